//! TOML descriptions of multiports.
//!
//! ```toml
//! dim = 4
//! kind = "element-list"      # or "symmetric" / "asymmetric"
//! offset_deg = 0.0           # asymmetric only
//!
//! [[elements]]
//! kind = "beamsplitter"      # parameter = reflectivity in [0, 1]
//! modes = [0, 1]
//! parameter = 0.5
//!
//! [[elements]]
//! kind = "phase-shifter"     # parameter = phase in degrees
//! modes = [1]
//! parameter = 90.0
//!
//! [[elements]]
//! kind = "mode-swap"         # no parameter
//! modes = [0, 2]
//! ```
//!
//! Mode indices are zero-based. Elements apply in listed order.

use serde::{Deserialize, Serialize};

use super::{asymmetric_multiport, compose, symmetric_multiport, ModeUnitary, OpticalElement};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MultiportKind {
    Symmetric,
    Asymmetric,
    ElementList,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ElementKind {
    Beamsplitter,
    PhaseShifter,
    ModeSwap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementSpec {
    pub kind: ElementKind,
    pub modes: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parameter: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiportSpec {
    pub dim: usize,
    pub kind: MultiportKind,
    #[serde(default)]
    pub offset_deg: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub elements: Vec<ElementSpec>,
}

impl MultiportSpec {
    pub fn symmetric(dim: usize) -> Self {
        MultiportSpec {
            dim,
            kind: MultiportKind::Symmetric,
            offset_deg: 0.0,
            elements: Vec::new(),
        }
    }

    pub fn asymmetric(dim: usize, offset_deg: f64) -> Self {
        MultiportSpec {
            dim,
            kind: MultiportKind::Asymmetric,
            offset_deg,
            elements: Vec::new(),
        }
    }

    /// Spec of [`super::canonical_multiport`].
    pub fn canonical(dim: usize) -> Self {
        if dim.is_multiple_of(2) {
            Self::asymmetric(dim, 0.0)
        } else {
            Self::symmetric(dim)
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("multiport spec always serializes")
    }

    pub fn build(&self) -> Result<ModeUnitary> {
        match self.kind {
            MultiportKind::Symmetric => symmetric_multiport(self.dim),
            MultiportKind::Asymmetric => asymmetric_multiport(self.dim, self.offset_deg.to_radians()),
            MultiportKind::ElementList => {
                let elements = self
                    .elements
                    .iter()
                    .map(ElementSpec::to_element)
                    .collect::<Result<Vec<_>>>()?;
                compose(&elements, self.dim)
            }
        }
    }
}

impl ElementSpec {
    pub fn to_element(&self) -> Result<OpticalElement> {
        let want_modes = |n: usize| {
            if self.modes.len() == n {
                Ok(())
            } else {
                Err(Error::Config(format!(
                    "{:?} takes {n} mode(s), got {}",
                    self.kind,
                    self.modes.len()
                )))
            }
        };
        let parameter = || {
            self.parameter
                .ok_or_else(|| Error::Config(format!("{:?} needs a parameter", self.kind)))
        };
        Ok(match self.kind {
            ElementKind::Beamsplitter => {
                want_modes(2)?;
                OpticalElement::BeamSplitter {
                    modes: (self.modes[0], self.modes[1]),
                    reflectivity: parameter()?,
                }
            }
            ElementKind::PhaseShifter => {
                want_modes(1)?;
                OpticalElement::PhaseShifter {
                    mode: self.modes[0],
                    phase: parameter()?.to_radians(),
                }
            }
            ElementKind::ModeSwap => {
                want_modes(2)?;
                if self.parameter.is_some() {
                    return Err(Error::Config("mode-swap takes no parameter".into()));
                }
                OpticalElement::ModeSwap {
                    modes: (self.modes[0], self.modes[1]),
                }
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_element_list() {
        let spec = MultiportSpec::from_toml(
            r#"
            dim = 3
            kind = "element-list"

            [[elements]]
            kind = "beamsplitter"
            modes = [0, 1]
            parameter = 0.5

            [[elements]]
            kind = "phase-shifter"
            modes = [1]
            parameter = 90.0

            [[elements]]
            kind = "mode-swap"
            modes = [1, 2]
            "#,
        )
        .unwrap();
        assert_eq!(spec.elements.len(), 3);
        let u = spec.build().unwrap();
        assert_eq!(u.dim(), 3);
        assert!(u.unitarity_residual() < 1e-12);
    }

    #[test]
    fn named_kinds_build() {
        let u = MultiportSpec::from_toml("dim = 3\nkind = \"symmetric\"\n")
            .unwrap()
            .build()
            .unwrap();
        assert_eq!(u, symmetric_multiport(3).unwrap());
        let spec = MultiportSpec::asymmetric(6, 15.0);
        let back = MultiportSpec::from_toml(&spec.to_toml()).unwrap();
        assert_eq!(back, spec);
        assert_eq!(back.build().unwrap().dim(), 6);
    }

    #[test]
    fn malformed_configs_fail() {
        assert!(MultiportSpec::from_toml("dim = 3\nkind = \"tritter\"\n").is_err());
        assert!(MultiportSpec::from_toml("dim = 3\n").is_err());
        assert!(MultiportSpec::from_toml("dim = 3\nkind = \"symmetric\"\ncolour = 1\n").is_err());
        let spec = MultiportSpec::from_toml(
            "dim = 2\nkind = \"element-list\"\n[[elements]]\nkind = \"beamsplitter\"\nmodes = [0]\nparameter = 0.5\n",
        )
        .unwrap();
        assert!(matches!(spec.build(), Err(Error::Config(_))));
        let spec = MultiportSpec::from_toml(
            "dim = 2\nkind = \"element-list\"\n[[elements]]\nkind = \"beamsplitter\"\nmodes = [0, 1]\n",
        )
        .unwrap();
        assert!(matches!(spec.build(), Err(Error::Config(_))));
        assert!(MultiportSpec::asymmetric(5, 0.0).build().is_err());
    }
}
