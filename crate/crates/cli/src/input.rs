// SPDX-License-Identifier: Apache-2.0

//! Resolving the single input source of a command.

use std::path::{Path, PathBuf};

use bd_cutoff::{BirthDeathChain, FamilySpec, MetropolisTarget, Spectrum};
use clap::{Args, ValueEnum};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyKind {
    Srw,
    BiasedWalk,
    MetropolisPower,
    MetropolisBinomial,
    MetropolisUniform,
    BernoulliLaplace,
    Hamming,
    ThetaHypercube,
    QSubspace,
}

/// Family parameters shared by every verb that accepts `--family`.
#[derive(Debug, Clone, Default, Args)]
pub struct FamilyParams {
    /// Size parameter n.
    #[arg(long)]
    pub n: Option<usize>,
    /// Size parameter r.
    #[arg(long)]
    pub r: Option<usize>,
    /// Subspace dimension m (q-subspace).
    #[arg(long)]
    pub m: Option<usize>,
    /// Up probability of the biased walk.
    #[arg(long)]
    pub p: Option<f64>,
    /// Field size of the q-subspace family.
    #[arg(long)]
    pub q: Option<u64>,
    /// θ of the θ-hypercube.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Exponent d of the power Metropolis target.
    #[arg(long)]
    pub d: Option<f64>,
}

/// Exactly one of these selects the chain or spectrum to analyze.
#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Chain file in JSON form `{"m", "p", "q", "r"}`.
    #[arg(long, group = "source")]
    pub chain: Option<PathBuf>,
    /// Built-in family, parameterized by the family flags.
    #[arg(long, value_enum, group = "source")]
    pub family: Option<FamilyKind>,
    /// Family description in JSON form `{"kind", "params"}`.
    #[arg(long, group = "source")]
    pub family_json: Option<PathBuf>,
    /// Spectrum CSV as written by `spectrum` (only for spectral verbs).
    #[arg(long, group = "source")]
    pub spectrum: Option<PathBuf>,
    #[command(flatten)]
    pub params: FamilyParams,
}

pub enum Source {
    Chain(BirthDeathChain),
    Spectrum(Spectrum),
}

impl Source {
    pub fn spectrum(&self) -> Result<Spectrum, CliError> {
        match self {
            Source::Chain(c) => Ok(c.spectrum()?.clone()),
            Source::Spectrum(s) => Ok(s.clone()),
        }
    }

    pub fn chain(self, verb: &str) -> Result<BirthDeathChain, CliError> {
        match self {
            Source::Chain(c) => Ok(c),
            Source::Spectrum(_) => Err(CliError::usage(format!(
                "{verb} needs a chain or family input, not a spectrum"
            ))),
        }
    }
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

fn require<T>(value: Option<T>, flag: &str, kind: FamilyKind) -> Result<T, CliError> {
    value.ok_or_else(|| {
        CliError::usage(format!(
            "family {} needs --{flag}",
            kind.to_possible_value().expect("no skipped variants").get_name()
        ))
    })
}

/// Builds a family description from flags; `size` overrides the size parameter.
pub fn family_spec(
    kind: FamilyKind,
    params: &FamilyParams,
    size: Option<usize>,
) -> Result<FamilySpec, CliError> {
    use FamilyKind as K;
    let n = || size.or(params.n);
    let r = || size.or(params.r);
    Ok(match kind {
        K::Srw => FamilySpec::SrwLazyEnds {
            n: require(n(), "n", kind)?,
        },
        K::BiasedWalk => FamilySpec::BiasedWalk {
            p: require(params.p, "p", kind)?,
            n: require(n(), "n", kind)?,
        },
        K::MetropolisPower => FamilySpec::Metropolis {
            target: MetropolisTarget::Power {
                n: require(n(), "n", kind)?,
                d: require(params.d, "d", kind)?,
            },
        },
        K::MetropolisBinomial => FamilySpec::Metropolis {
            target: MetropolisTarget::Binomial {
                n: require(n(), "n", kind)?,
            },
        },
        K::MetropolisUniform => FamilySpec::Metropolis {
            target: MetropolisTarget::Uniform {
                n: require(n(), "n", kind)?,
            },
        },
        K::BernoulliLaplace => FamilySpec::BernoulliLaplace {
            n: require(params.n, "n", kind)?,
            r: require(r(), "r", kind)?,
        },
        K::Hamming => FamilySpec::Hamming {
            n: require(params.n, "n", kind)?,
            r: require(r(), "r", kind)?,
        },
        K::ThetaHypercube => FamilySpec::ThetaHypercube {
            theta: require(params.theta, "theta", kind)?,
            r: require(r(), "r", kind)?,
        },
        K::QSubspace => {
            let m = require(size.or(params.m), "m", kind)?;
            FamilySpec::QSubspace {
                q: require(params.q, "q", kind)?,
                n: params.n.unwrap_or(2 * m),
                m,
            }
        }
    })
}

/// Parses a spectrum CSV: optional header, then `index,lambda` or `lambda` rows.
pub fn parse_spectrum_csv(text: &str) -> Result<Spectrum, CliError> {
    let mut lambdas = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let field = line.rsplit(',').next().unwrap_or(line).trim();
        match field.parse::<f64>() {
            Ok(v) => lambdas.push(v),
            Err(_) if lineno == 0 => continue,
            Err(_) => {
                return Err(CliError::Domain(bd_cutoff::Error::Parse(format!(
                    "line {}: cannot parse eigenvalue {field:?}",
                    lineno + 1
                ))))
            }
        }
    }
    Ok(Spectrum::new(lambdas)?)
}

pub fn resolve(input: &InputArgs) -> Result<Source, CliError> {
    if let Some(path) = &input.chain {
        return Ok(Source::Chain(BirthDeathChain::from_json(&read_text(path)?)?));
    }
    if let Some(kind) = input.family {
        let spec = family_spec(kind, &input.params, None)?;
        return Ok(Source::Chain(spec.build()?));
    }
    if let Some(path) = &input.family_json {
        let spec = parse_family_json(&read_text(path)?)?;
        return Ok(Source::Chain(spec.build()?));
    }
    if let Some(path) = &input.spectrum {
        return Ok(Source::Spectrum(parse_spectrum_csv(&read_text(path)?)?));
    }
    Err(CliError::usage(
        "one of --chain, --family, --family-json or --spectrum is required".into(),
    ))
}

pub fn parse_family_json(text: &str) -> Result<FamilySpec, CliError> {
    serde_json::from_str(text)
        .map_err(|e| CliError::Domain(bd_cutoff::Error::Parse(e.to_string())))
}

pub fn parse_family_list(text: &str) -> Result<Vec<FamilySpec>, CliError> {
    serde_json::from_str(text)
        .map_err(|e| CliError::Domain(bd_cutoff::Error::Parse(e.to_string())))
}
