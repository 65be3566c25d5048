//! Concrete model manifolds.

pub mod dec;
pub mod formal;
pub mod product;
pub mod sphere;
pub mod torus;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::derham::DeRhamBackend;
use crate::error::{Error, Result};
use crate::scalar::Rational;

pub use dec::{DecBackend, SymmetricMesh};
pub use formal::{ContractionFn, FormalGenerators};
pub use product::ProductBackend;
pub use sphere::SphereBackend;
pub use torus::TorusBackend;

/// Shared handle to an exact backend.
pub type ExactBackend = Arc<dyn DeRhamBackend<Scalar = Rational>>;

/// Parameters identifying a backend; the text form appears in form files.
///
/// Text syntax: `sphere N=8`, `torus n=2 K=3 v=1,0`, `dec nsym=8 level=2`,
/// `product(sphere N=4;sphere N=4)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum BackendSpec {
    Sphere {
        truncation: usize,
    },
    Torus {
        dim: usize,
        truncation: usize,
        action: Vec<i64>,
    },
    Product {
        first: Box<BackendSpec>,
        second: Box<BackendSpec>,
    },
    Dec {
        n_sym: usize,
        level: usize,
    },
}

impl BackendSpec {
    pub fn is_exact(&self) -> bool {
        match self {
            BackendSpec::Dec { .. } => false,
            BackendSpec::Product { first, second } => first.is_exact() && second.is_exact(),
            _ => true,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            BackendSpec::Sphere { .. } => "sphere",
            BackendSpec::Torus { .. } => "torus",
            BackendSpec::Product { .. } => "product",
            BackendSpec::Dec { .. } => "dec",
        }
    }

    /// Builds an exact backend; DEC specs are rejected.
    pub fn build_exact(&self) -> Result<ExactBackend> {
        Ok(match self {
            BackendSpec::Sphere { truncation } => Arc::new(SphereBackend::new(*truncation)?),
            BackendSpec::Torus {
                dim,
                truncation,
                action,
            } => Arc::new(TorusBackend::new(*dim, *truncation, action)?),
            BackendSpec::Product { first, second } => {
                Arc::new(ProductBackend::new(first.build_exact()?, second.build_exact()?)?)
            }
            BackendSpec::Dec { .. } => {
                return Err(Error::InvalidParameters(
                    "the DEC backend is not exact; product factors must be exact backends".into(),
                ))
            }
        })
    }
}

impl fmt::Display for BackendSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BackendSpec::Sphere { truncation } => write!(f, "sphere N={truncation}"),
            BackendSpec::Torus {
                dim,
                truncation,
                action,
            } => {
                let v: Vec<String> = action.iter().map(i64::to_string).collect();
                write!(f, "torus n={dim} K={truncation} v={}", v.join(","))
            }
            BackendSpec::Product { first, second } => write!(f, "product({first};{second})"),
            BackendSpec::Dec { n_sym, level } => write!(f, "dec nsym={n_sym} level={level}"),
        }
    }
}

impl FromStr for BackendSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        let bad = |msg: String| Error::InvalidParameters(msg);
        if let Some(inner) = text.strip_prefix("product(").and_then(|r| r.strip_suffix(')')) {
            // split at the top-level ';'
            let mut depth = 0usize;
            let mut split = None;
            for (i, c) in inner.char_indices() {
                match c {
                    '(' => depth += 1,
                    ')' => depth = depth.saturating_sub(1),
                    ';' if depth == 0 => {
                        split = Some(i);
                        break;
                    }
                    _ => {}
                }
            }
            let i = split.ok_or_else(|| bad(format!("product needs two factors: `{text}`")))?;
            return Ok(BackendSpec::Product {
                first: Box::new(inner[..i].parse()?),
                second: Box::new(inner[i + 1..].parse()?),
            });
        }
        let mut words = text.split_whitespace();
        let tag = words.next().ok_or_else(|| bad("empty backend".into()))?;
        let mut params = std::collections::BTreeMap::new();
        for w in words {
            let (k, v) = w
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key=value, got `{w}`")))?;
            if params.insert(k.to_string(), v.to_string()).is_some() {
                return Err(bad(format!("duplicate parameter `{k}`")));
            }
        }
        let mut take = |key: &str| -> Result<String> {
            params
                .remove(key)
                .ok_or_else(|| bad(format!("`{tag}` backend needs `{key}=`")))
        };
        let int = |s: String| -> Result<usize> { s.parse().map_err(|_| bad(format!("invalid integer `{s}`"))) };
        let spec = match tag {
            "sphere" => BackendSpec::Sphere {
                truncation: int(take("N")?)?,
            },
            "torus" => BackendSpec::Torus {
                dim: int(take("n")?)?,
                truncation: int(take("K")?)?,
                action: take("v")?
                    .split(',')
                    .map(|s| s.trim().parse().map_err(|_| bad(format!("invalid action entry `{s}`"))))
                    .collect::<Result<_>>()?,
            },
            "dec" => BackendSpec::Dec {
                n_sym: int(take("nsym")?)?,
                level: int(take("level")?)?,
            },
            other => return Err(bad(format!("unknown backend tag `{other}`"))),
        };
        if let Some(extra) = params.keys().next() {
            return Err(bad(format!("unknown parameter `{extra}` for `{tag}`")));
        }
        Ok(spec)
    }
}
