use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum GroupFamily {
    /// `SO(p,q)` for the form `I_p ⊕ -I_q`.
    SpecialOrthogonalIndefinite { p: usize, q: usize },
    /// Compact `SO(n)`.
    SpecialOrthogonal { n: usize },
    /// Block product `SO(p) × SO(q)`.
    Product { p: usize, q: usize },
}

/// Dimension data of one of the orthogonal groups the estimates work with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupDescriptor {
    pub family: GroupFamily,
    pub natural_dim: usize,
    pub dim: usize,
    pub rank: usize,
    pub ss_rank: usize,
}

fn so_dim(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Semisimple rank of `SO(n)`: `SO(2)` is a torus, `SO(0)` and `SO(1)` are trivial.
fn so_ss_rank(n: usize) -> usize {
    if n >= 3 {
        n / 2
    } else {
        0
    }
}

impl GroupDescriptor {
    pub fn so_pq(p: usize, q: usize) -> Result<Self> {
        let n = p + q;
        if n < 2 {
            return Err(Error::invalid(format!("SO({p},{q}) needs p+q >= 2")));
        }
        Ok(GroupDescriptor {
            family: GroupFamily::SpecialOrthogonalIndefinite { p, q },
            natural_dim: n,
            dim: so_dim(n),
            rank: n / 2,
            ss_rank: so_ss_rank(n),
        })
    }

    pub fn so(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!("SO({n}) needs n >= 2")));
        }
        Ok(GroupDescriptor {
            family: GroupFamily::SpecialOrthogonal { n },
            natural_dim: n,
            dim: so_dim(n),
            rank: n / 2,
            ss_rank: so_ss_rank(n),
        })
    }

    pub fn product(p: usize, q: usize) -> Result<Self> {
        if p < 2 || q < 2 {
            return Err(Error::invalid(format!(
                "SO({p})×SO({q}) needs both factors of size >= 2"
            )));
        }
        Ok(GroupDescriptor {
            family: GroupFamily::Product { p, q },
            natural_dim: p + q,
            dim: so_dim(p) + so_dim(q),
            rank: p / 2 + q / 2,
            ss_rank: so_ss_rank(p) + so_ss_rank(q),
        })
    }

    /// `(p, q)` of the underlying form, with `q = 0` for the compact group.
    pub fn signature(&self) -> (usize, usize) {
        match self.family {
            GroupFamily::SpecialOrthogonalIndefinite { p, q } | GroupFamily::Product { p, q } => {
                (p, q)
            }
            GroupFamily::SpecialOrthogonal { n } => (n, 0),
        }
    }

    /// `SO(p,q)` is split exactly when `p = q` or `|p - q| = 1`.
    pub fn is_split(&self) -> bool {
        match self.family {
            GroupFamily::SpecialOrthogonalIndefinite { p, q } => p.abs_diff(q) <= 1,
            _ => false,
        }
    }

    pub fn is_compact(&self) -> bool {
        match self.family {
            GroupFamily::SpecialOrthogonalIndefinite { p, q } => p == 0 || q == 0,
            GroupFamily::SpecialOrthogonal { .. } | GroupFamily::Product { .. } => true,
        }
    }

    /// True for the nonsplit noncompact `SO(p,q)` covered by the main estimate.
    pub fn meets_main_hypotheses(&self) -> bool {
        matches!(self.family, GroupFamily::SpecialOrthogonalIndefinite { .. })
            && !self.is_split()
            && !self.is_compact()
    }

    pub fn label(&self) -> String {
        match self.family {
            GroupFamily::SpecialOrthogonalIndefinite { p, q } => format!("SO({p},{q})"),
            GroupFamily::SpecialOrthogonal { n } => format!("SO({n})"),
            GroupFamily::Product { p, q } => format!("SO({p})xSO({q})"),
        }
    }
}
