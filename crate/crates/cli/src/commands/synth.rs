//! `recmin synth`: a synthetic ratings set with genre labels.

use recmin::synth::{generate, write_movies};
use recmin::{Format, Scale, SynthConfig};

use crate::cli::SynthArgs;
use crate::error::{CliError, CliResult};
use crate::output::Outputs;

pub fn config(args: &SynthArgs) -> SynthConfig {
    let mut cfg = SynthConfig {
        users: args.users,
        items: args.items,
        seed: args.seed,
        quantize: !args.no_quantize,
        ..SynthConfig::default()
    };
    if let Some(v) = args.factors {
        cfg.factors = v;
    }
    if let Some(v) = args.noise {
        cfg.noise = v;
    }
    if let Some(v) = args.min_profile {
        cfg.min_profile = v;
    }
    if let Some(v) = args.max_profile {
        cfg.max_profile = v;
    }
    if let Some(v) = args.median_extra {
        cfg.median_extra = v;
    }
    if let Some(v) = args.popularity_exponent {
        cfg.popularity_exponent = v;
    }
    cfg
}

pub fn execute(cfg: &SynthConfig) -> CliResult<Outputs> {
    let data = generate::<f64>(cfg, Scale::movielens())?;
    let mut out = Outputs::default();
    let mut ratings = Vec::new();
    data.dataset.write(&mut ratings, Format::MovielensCsv)?;
    out.add("ratings.csv", ratings);
    let mut movies = Vec::new();
    write_movies(&mut movies, &data.genres)?;
    out.add("movies.csv", movies);
    let toml = toml::to_string(cfg)
        .map_err(|e| CliError::Internal(format!("serializing synth config: {e}")))?;
    out.add("synth.toml", toml.into_bytes());
    Ok(out)
}
