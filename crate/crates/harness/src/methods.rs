//! Method identifiers used in configs and CSV headers.

use std::fmt;
use std::str::FromStr;

use drg_core::integrators::presets;
use drg_core::{CenterFunction, DiscreteGradient, DrgKind, OneStepMethod, SkewApprox};

use crate::config::{ConfigError, RawConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MethodId {
    Ia,
    Avf,
    Mp,
    Mmp,
    Sia,
    Ia2,
    Comp2,
    CompSia,
    Comp4,
    /// Gauss collocation; `None` takes the stage count from the config.
    Collocation(Option<usize>),
    ImplicitMidpoint,
}

pub const VALID_IDS: &str =
    "ia, avf, mp, mmp, sia, ia2, comp2, comp-sia, comp4, coll, coll1..coll8, imp";

impl MethodId {
    pub fn parse(s: &str) -> Result<Self, String> {
        let id = match s {
            "ia" => MethodId::Ia,
            "avf" => MethodId::Avf,
            "mp" => MethodId::Mp,
            "mmp" => MethodId::Mmp,
            "sia" => MethodId::Sia,
            "ia2" => MethodId::Ia2,
            "comp2" => MethodId::Comp2,
            "comp-sia" => MethodId::CompSia,
            "comp4" => MethodId::Comp4,
            "coll" => MethodId::Collocation(None),
            "imp" => MethodId::ImplicitMidpoint,
            _ => match s.strip_prefix("coll").and_then(|n| n.parse::<usize>().ok()) {
                Some(n) if (1..=8).contains(&n) => MethodId::Collocation(Some(n)),
                _ => return Err(format!("unknown method `{s}`; valid ids: {VALID_IDS}")),
            },
        };
        Ok(id)
    }

    /// Canonical id, resolving `coll` to `coll<s>`.
    pub fn label(&self, opts: &MethodOptions) -> String {
        match self {
            MethodId::Collocation(s) => format!("coll{}", s.unwrap_or(opts.stages)),
            other => other.to_string(),
        }
    }

    pub fn build(&self, opts: &MethodOptions) -> drg_core::Result<OneStepMethod> {
        let drg = |kind: DrgKind, default_center: CenterFunction| {
            let center = opts.center.unwrap_or(default_center);
            let skew = opts.omega.unwrap_or(SkewApprox::AtCenter);
            OneStepMethod::drg(DiscreteGradient::new(kind, center), skew)
        };
        Ok(match self {
            MethodId::Ia => drg(DrgKind::ItohAbe, CenterFunction::Left),
            MethodId::Avf => drg(DrgKind::Avf { nq: opts.nq }, CenterFunction::ChordalMidpoint),
            MethodId::Mp => drg(DrgKind::Midpoint, CenterFunction::ChordalMidpoint),
            MethodId::Sia => drg(DrgKind::SymmetrizedItohAbe, CenterFunction::ChordalMidpoint),
            MethodId::Mmp => drg(DrgKind::ModifiedMidpoint, CenterFunction::ChordalMidpoint),
            MethodId::Ia2 => presets::ia2(),
            MethodId::Comp2 => presets::comp2(),
            MethodId::CompSia => presets::comp_sia(),
            MethodId::Comp4 => presets::comp4(),
            MethodId::Collocation(s) => presets::collocation(s.unwrap_or(opts.stages))?,
            MethodId::ImplicitMidpoint => OneStepMethod::ImplicitMidpoint,
        })
    }
}

impl FromStr for MethodId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::parse(s)
    }
}

impl fmt::Display for MethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MethodId::Ia => f.write_str("ia"),
            MethodId::Avf => f.write_str("avf"),
            MethodId::Mp => f.write_str("mp"),
            MethodId::Mmp => f.write_str("mmp"),
            MethodId::Sia => f.write_str("sia"),
            MethodId::Ia2 => f.write_str("ia2"),
            MethodId::Comp2 => f.write_str("comp2"),
            MethodId::CompSia => f.write_str("comp-sia"),
            MethodId::Comp4 => f.write_str("comp4"),
            MethodId::Collocation(None) => f.write_str("coll"),
            MethodId::Collocation(Some(s)) => write!(f, "coll{s}"),
            MethodId::ImplicitMidpoint => f.write_str("imp"),
        }
    }
}

/// Overrides that apply to the single-DRG ids (`ia`, `avf`, `mp`, `sia`,
/// `mmp`) and to `coll`. Named compositions ignore them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MethodOptions {
    pub center: Option<CenterFunction>,
    pub omega: Option<SkewApprox>,
    pub nq: usize,
    pub stages: usize,
}

impl MethodOptions {
    pub(crate) fn from_raw(raw: &RawConfig, nq: usize) -> Result<Self, ConfigError> {
        let center = match raw.center.as_deref() {
            None => None,
            Some("left") => Some(CenterFunction::Left),
            Some("midpoint") => Some(CenterFunction::ChordalMidpoint),
            Some(other) => {
                return Err(ConfigError::Invalid {
                    key: "center",
                    message: format!("unknown center `{other}`; valid: left, midpoint"),
                })
            }
        };
        let omega = match raw.omega.as_deref() {
            None => None,
            Some("left") => Some(SkewApprox::AtLeft),
            Some("center") => Some(SkewApprox::AtCenter),
            Some("pulled-back") => Some(SkewApprox::PulledBack { fraction: 0.5 }),
            Some(other) => {
                return Err(ConfigError::Invalid {
                    key: "omega",
                    message: format!("unknown omega `{other}`; valid: left, center, pulled-back"),
                })
            }
        };
        let stages = raw.stages.unwrap_or(2);
        if !(1..=8).contains(&stages) {
            return Err(ConfigError::Invalid {
                key: "stages",
                message: format!("must be in 1..=8, got {stages}"),
            });
        }
        Ok(Self { center, omega, nq, stages })
    }
}

impl Default for MethodOptions {
    fn default() -> Self {
        Self { center: None, omega: None, nq: drg_core::gradients::DEFAULT_NQ, stages: 2 }
    }
}
