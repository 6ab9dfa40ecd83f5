//! Named parameter profiles for the CLI: `desk` keeps the demos and the
//! attack harness fast; `full` is the λ=128 configuration.

use cefe::base::LweParams;
use cefe::cd::css::CssProfile;
use cefe::cd::qrom::QromProfile;
use cefe::fe::one_bounded::Fe1Profile;
use cefe::garble::GcProfile;
use cefe::rnce::RnceProfile;

use crate::util::{Args, CliResult, Failure};

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    Desk,
    Full,
}

impl ProfileKind {
    pub fn from_args(args: &Args) -> CliResult<Self> {
        match args.flag("profile") {
            None => Ok(Self::Desk),
            Some("desk") => Ok(Self::Desk),
            Some("full") => Ok(Self::Full),
            Some(other) => Err(Failure::usage(format!(
                "unknown profile {other:?} (expected desk or full)"
            ))),
        }
    }

    pub fn qrom(self) -> QromProfile {
        match self {
            Self::Desk => QromProfile::test_profile(),
            Self::Full => QromProfile::default_lambda128(),
        }
    }

    pub fn lwe(self) -> LweParams {
        match self {
            Self::Desk => LweParams::test_profile(),
            Self::Full => LweParams::default_profile(),
        }
    }

    pub fn gc(self) -> GcProfile {
        match self {
            Self::Desk => GcProfile::test_profile(),
            Self::Full => GcProfile::default_lambda128(),
        }
    }

    pub fn fe1(self) -> Fe1Profile {
        Fe1Profile {
            gc: self.gc(),
            lwe: self.lwe(),
        }
    }

    pub fn rnce(self) -> RnceProfile {
        match self {
            Self::Desk => RnceProfile {
                lwe: LweParams {
                    n: 16,
                    q: 4093,
                    m: 32,
                    beta: 2,
                },
                qrom: QromProfile { w: 4, r_bytes: 2 },
            },
            Self::Full => RnceProfile {
                lwe: LweParams::default_profile(),
                qrom: QromProfile::default_lambda128(),
            },
        }
    }

    pub fn css(self) -> CssProfile {
        // The Steane pair is the desk CSS configuration in both profiles;
        // larger pairs load from code files via --c1/--c2/--t/--p.
        CssProfile::steane()
    }
}
