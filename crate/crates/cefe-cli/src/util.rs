//! Shared CLI plumbing: exit codes, a tiny flag parser, seeded RNG.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use cefe::wire::WireError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_BAD_ENVELOPE: i32 = 2;
pub const EXIT_PROTOCOL: i32 = 3;
pub const EXIT_PARAMS: i32 = 4;

/// A CLI failure carrying its exit code.
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn usage(msg: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: msg.into(),
        }
    }

    pub fn envelope(msg: impl Into<String>) -> Self {
        Self {
            code: EXIT_BAD_ENVELOPE,
            message: msg.into(),
        }
    }

    pub fn protocol(msg: impl Into<String>) -> Self {
        Self {
            code: EXIT_PROTOCOL,
            message: msg.into(),
        }
    }

    pub fn params(msg: impl Into<String>) -> Self {
        Self {
            code: EXIT_PARAMS,
            message: msg.into(),
        }
    }
}

impl From<WireError> for Failure {
    fn from(e: WireError) -> Self {
        Failure::envelope(e.to_string())
    }
}

macro_rules! from_protocol_error {
    ($($ty:ty),*) => {
        $(impl From<$ty> for Failure {
            fn from(e: $ty) -> Self {
                Failure::protocol(e.to_string())
            }
        })*
    };
}

from_protocol_error!(
    cefe::cd::CdError,
    cefe::garble::GarbleError,
    cefe::fe::FeError,
    cefe::qsim::QsimError,
    cefe::gf2::Gf2Error,
    cefe::base::BaseError
);

pub type CliResult<T> = Result<T, Failure>;

/// Flags of the form `--name value` plus bare positionals, in order.
pub struct Args {
    pub positional: Vec<String>,
    pub flags: HashMap<String, String>,
    pub switches: Vec<String>,
}

const SWITCHES: &[&str] = &["force", "full"];

impl Args {
    pub fn parse(raw: &[String]) -> CliResult<Self> {
        let mut positional = Vec::new();
        let mut flags = HashMap::new();
        let mut switches = Vec::new();
        let mut it = raw.iter().peekable();
        while let Some(tok) = it.next() {
            if let Some(name) = tok.strip_prefix("--") {
                if SWITCHES.contains(&name) {
                    switches.push(name.to_string());
                } else {
                    let value = it
                        .next()
                        .ok_or_else(|| Failure::usage(format!("--{name} needs a value")))?;
                    flags.insert(name.to_string(), value.clone());
                }
            } else {
                positional.push(tok.clone());
            }
        }
        Ok(Self {
            positional,
            flags,
            switches,
        })
    }

    pub fn flag(&self, name: &str) -> Option<&str> {
        self.flags.get(name).map(String::as_str)
    }

    pub fn require(&self, name: &str) -> CliResult<&str> {
        self.flag(name)
            .ok_or_else(|| Failure::usage(format!("missing required flag --{name}")))
    }

    pub fn switch(&self, name: &str) -> bool {
        self.switches.iter().any(|s| s == name)
    }

    pub fn parse_flag<T: std::str::FromStr>(&self, name: &str, default: T) -> CliResult<T> {
        match self.flag(name) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Failure::usage(format!("bad value for --{name}: {v:?}"))),
        }
    }
}

/// Every probabilistic command honors --seed for reproducible transcripts.
pub fn rng_from_args(args: &Args) -> CliResult<ChaCha12Rng> {
    let seed: u64 = args.parse_flag("seed", 0xCEFE)?;
    Ok(ChaCha12Rng::seed_from_u64(seed))
}

pub fn parse_bits(s: &str) -> CliResult<cefe::bits::BitVec> {
    cefe::bits::BitVec::from_str01(s)
        .ok_or_else(|| Failure::usage(format!("expected a 0/1 string, got {s:?}")))
}
