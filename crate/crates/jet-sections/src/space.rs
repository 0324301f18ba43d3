//! Variable spaces and jet variables.
//!
//! A jet variable is a coordinate together with a formal derivative
//! order. Coordinates live either in an affine chart `U_j` (indices
//! `1..=N`), in homogeneous coordinates (indices `0..=N`), or in the
//! mixed space used while verifying dehomogenization identities, where
//! index `0` stands for the homogeneous variable of the chart and
//! `1..=N` are the chart's affine coordinates.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SpaceKind {
    Affine { chart: usize },
    Homogeneous,
    Mixed { chart: usize },
}

/// The ambient variable space of a polynomial.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct VarSpace {
    kind: SpaceKind,
    n: usize,
}

impl VarSpace {
    pub fn affine(chart: usize, n: usize) -> Result<Self> {
        if chart > n {
            return Err(Error::InvalidChart { chart, n });
        }
        Ok(VarSpace {
            kind: SpaceKind::Affine { chart },
            n,
        })
    }

    pub fn homogeneous(n: usize) -> Self {
        VarSpace {
            kind: SpaceKind::Homogeneous,
            n,
        }
    }

    pub fn mixed(chart: usize, n: usize) -> Result<Self> {
        if chart > n {
            return Err(Error::InvalidChart { chart, n });
        }
        Ok(VarSpace {
            kind: SpaceKind::Mixed { chart },
            n,
        })
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    /// Ambient projective dimension `N`.
    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn chart(&self) -> Option<usize> {
        match self.kind {
            SpaceKind::Affine { chart } | SpaceKind::Mixed { chart } => Some(chart),
            SpaceKind::Homogeneous => None,
        }
    }

    pub fn is_affine(&self) -> bool {
        matches!(self.kind, SpaceKind::Affine { .. })
    }

    /// Valid coordinate indices for this space.
    pub fn coords(&self) -> std::ops::RangeInclusive<usize> {
        match self.kind {
            SpaceKind::Affine { .. } => 1..=self.n,
            SpaceKind::Homogeneous | SpaceKind::Mixed { .. } => 0..=self.n,
        }
    }

    pub fn contains(&self, var: JetVar) -> bool {
        self.coords().contains(&var.coord)
    }

    pub fn check_var(&self, var: JetVar) -> Result<()> {
        if self.contains(var) {
            Ok(())
        } else {
            Err(Error::InvalidCoordinate {
                coord: var.coord,
                space: self.to_string(),
            })
        }
    }

    pub fn check_same(&self, other: &VarSpace) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::SpaceMismatch(self.to_string(), other.to_string()))
        }
    }

    /// The total order on variables: blocks of higher coordinate index
    /// come first (are smaller), and within a coordinate the derivative
    /// order increases.
    pub fn var_cmp(&self, a: JetVar, b: JetVar) -> Result<Ordering> {
        self.check_var(a)?;
        self.check_var(b)?;
        Ok(a.cmp(&b))
    }

    /// Canonical rendering of a variable in this space.
    pub fn render_var(&self, var: JetVar) -> String {
        let name = match self.kind {
            SpaceKind::Affine { .. } => format!("x[{}]", var.coord),
            SpaceKind::Homogeneous => format!("X[{}]", var.coord),
            SpaceKind::Mixed { chart } => {
                if var.coord == 0 {
                    format!("X[{chart}]")
                } else {
                    format!("x[{}]", var.coord)
                }
            }
        };
        if var.order == 0 {
            name
        } else {
            format!("{name}^({})", var.order)
        }
    }
}

#[derive(Serialize, Deserialize)]
struct SpaceRepr {
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    chart: Option<usize>,
    #[serde(rename = "N")]
    n: usize,
}

impl Serialize for VarSpace {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let kind = match self.kind {
            SpaceKind::Affine { .. } => "affine",
            SpaceKind::Homogeneous => "homogeneous",
            SpaceKind::Mixed { .. } => "mixed",
        };
        SpaceRepr {
            kind: kind.to_string(),
            chart: self.chart(),
            n: self.n,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for VarSpace {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = SpaceRepr::deserialize(deserializer)?;
        let need_chart = || {
            repr.chart
                .ok_or_else(|| serde::de::Error::custom("missing chart index"))
        };
        match repr.kind.as_str() {
            "affine" => VarSpace::affine(need_chart()?, repr.n).map_err(serde::de::Error::custom),
            "homogeneous" => Ok(VarSpace::homogeneous(repr.n)),
            "mixed" => VarSpace::mixed(need_chart()?, repr.n).map_err(serde::de::Error::custom),
            other => Err(serde::de::Error::custom(format!("unknown space kind: {other}"))),
        }
    }
}

impl fmt::Display for VarSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SpaceKind::Affine { chart } => write!(f, "affine(chart={chart},N={})", self.n),
            SpaceKind::Homogeneous => write!(f, "homogeneous(N={})", self.n),
            SpaceKind::Mixed { chart } => write!(f, "mixed(chart={chart},N={})", self.n),
        }
    }
}

/// A single jet variable: a coordinate differentiated `order` times.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct JetVar {
    pub coord: usize,
    pub order: usize,
}

impl JetVar {
    pub fn new(coord: usize, order: usize) -> Self {
        JetVar { coord, order }
    }

    /// The variable one derivative up.
    pub fn raised(self) -> Self {
        JetVar {
            coord: self.coord,
            order: self.order + 1,
        }
    }
}

impl Ord for JetVar {
    fn cmp(&self, other: &Self) -> Ordering {
        // Higher coordinate index forms a smaller block; within a
        // block, lower derivative order is smaller.
        other
            .coord
            .cmp(&self.coord)
            .then(self.order.cmp(&other.order))
    }
}

impl PartialOrd for JetVar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
