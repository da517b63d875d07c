//! Groups acting on carriers: finite cyclic groups, the integers, and finite
//! groups given by a Cayley table.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("element {element} does not belong to {group}")]
    Mismatch { element: String, group: String },
    #[error("integer overflow in group product")]
    Overflow,
    #[error("cyclic group order must be at least 1")]
    ZeroOrder,
    #[error("invalid Cayley table: {0}")]
    InvalidTable(String),
    #[error("cannot parse group element {text:?} in {group}")]
    Parse { text: String, group: String },
}

/// An element of some [`GroupSpec`].
///
/// The ordering lists the identity first in every group kind: residues
/// ascending, integers as `0, 1, -1, 2, -2, ...`, table elements in the
/// order they were declared with the identity moved to the front.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupElement {
    Residue(u64),
    Int(i64),
    Index(usize),
}

impl GroupElement {
    fn rank(&self) -> (u8, u64, bool) {
        match *self {
            GroupElement::Residue(r) => (0, r, false),
            GroupElement::Int(n) => (1, n.unsigned_abs(), n < 0),
            GroupElement::Index(i) => (2, i as u64, false),
        }
    }
}

impl Ord for GroupElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank().cmp(&other.rank())
    }
}

impl PartialOrd for GroupElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A finite group given by its multiplication table. Index 0 is always the
/// identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CayleyTable {
    names: Vec<String>,
    index: HashMap<String, usize>,
    table: Vec<Vec<usize>>,
    inverses: Vec<usize>,
}

impl CayleyTable {
    /// Builds and validates a table. `rows[i][j]` names the product
    /// `names[i] * names[j]`.
    pub fn new(names: &[String], identity: &str, rows: &[Vec<String>]) -> Result<Self, GroupError> {
        let bad = |msg: String| GroupError::InvalidTable(msg);
        let n = names.len();
        if n == 0 {
            return Err(bad("no elements".into()));
        }
        let declared: HashMap<&str, usize> =
            names.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        if declared.len() != n {
            return Err(bad("duplicate element names".into()));
        }
        let id_decl = *declared
            .get(identity)
            .ok_or_else(|| bad(format!("identity {identity:?} is not an element")))?;

        // internal order: identity first, then the rest in declared order
        let order: Vec<usize> = std::iter::once(id_decl)
            .chain((0..n).filter(|&i| i != id_decl))
            .collect();
        let mut internal = vec![0; n];
        for (k, &d) in order.iter().enumerate() {
            internal[d] = k;
        }

        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(bad(format!("table must be {n}x{n}")));
        }
        let mut table = vec![vec![0; n]; n];
        for (i, row) in rows.iter().enumerate() {
            for (j, entry) in row.iter().enumerate() {
                let d = *declared
                    .get(entry.as_str())
                    .ok_or_else(|| bad(format!("entry {entry:?} is not an element")))?;
                table[internal[i]][internal[j]] = internal[d];
            }
        }

        if (0..n).any(|a| table[0][a] != a || table[a][0] != a) {
            return Err(bad(format!("{identity:?} is not a two-sided identity")));
        }
        let names_internal: Vec<String> = order.iter().map(|&d| names[d].clone()).collect();
        let mut inverses = vec![0; n];
        for (a, slot) in inverses.iter_mut().enumerate() {
            let inv = (0..n).find(|&b| table[a][b] == 0 && table[b][a] == 0);
            *slot = inv.ok_or_else(|| {
                bad(format!("{:?} has no two-sided inverse", names_internal[a]))
            })?;
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(bad(format!(
                            "not associative at ({:?}, {:?}, {:?})",
                            names_internal[a], names_internal[b], names_internal[c]
                        )));
                    }
                }
            }
        }
        let index = names_internal
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        Ok(CayleyTable {
            names: names_internal,
            index,
            table,
            inverses,
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupSpec {
    Cyclic(u64),
    Integers,
    Table(CayleyTable),
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Cyclic(n) => write!(f, "Z/{n}"),
            GroupSpec::Integers => write!(f, "Z"),
            GroupSpec::Table(t) => write!(f, "table group of order {}", t.len()),
        }
    }
}

impl GroupSpec {
    pub fn cyclic(n: u64) -> Result<Self, GroupError> {
        if n == 0 {
            Err(GroupError::ZeroOrder)
        } else {
            Ok(GroupSpec::Cyclic(n))
        }
    }

    pub fn identity(&self) -> GroupElement {
        match self {
            GroupSpec::Cyclic(_) => GroupElement::Residue(0),
            GroupSpec::Integers => GroupElement::Int(0),
            GroupSpec::Table(_) => GroupElement::Index(0),
        }
    }

    pub fn contains(&self, t: GroupElement) -> bool {
        match (self, t) {
            (GroupSpec::Cyclic(n), GroupElement::Residue(r)) => r < *n,
            (GroupSpec::Integers, GroupElement::Int(_)) => true,
            (GroupSpec::Table(tab), GroupElement::Index(i)) => i < tab.len(),
            _ => false,
        }
    }

    fn check(&self, t: GroupElement) -> Result<(), GroupError> {
        if self.contains(t) {
            Ok(())
        } else {
            Err(GroupError::Mismatch {
                element: format!("{t:?}"),
                group: self.to_string(),
            })
        }
    }

    /// The product `t * s`.
    pub fn mul(&self, t: GroupElement, s: GroupElement) -> Result<GroupElement, GroupError> {
        self.check(t)?;
        self.check(s)?;
        Ok(match (self, t, s) {
            (GroupSpec::Cyclic(n), GroupElement::Residue(a), GroupElement::Residue(b)) => {
                GroupElement::Residue(((a as u128 + b as u128) % *n as u128) as u64)
            }
            (GroupSpec::Integers, GroupElement::Int(a), GroupElement::Int(b)) => {
                GroupElement::Int(a.checked_add(b).ok_or(GroupError::Overflow)?)
            }
            (GroupSpec::Table(tab), GroupElement::Index(a), GroupElement::Index(b)) => {
                GroupElement::Index(tab.table[a][b])
            }
            _ => unreachable!("membership already checked"),
        })
    }

    pub fn inv(&self, t: GroupElement) -> Result<GroupElement, GroupError> {
        self.check(t)?;
        Ok(match (self, t) {
            (GroupSpec::Cyclic(n), GroupElement::Residue(a)) => {
                GroupElement::Residue(if a == 0 { 0 } else { n - a })
            }
            (GroupSpec::Integers, GroupElement::Int(a)) => {
                GroupElement::Int(a.checked_neg().ok_or(GroupError::Overflow)?)
            }
            (GroupSpec::Table(tab), GroupElement::Index(a)) => GroupElement::Index(tab.inverses[a]),
            _ => unreachable!("membership already checked"),
        })
    }

    /// All elements in order, or `None` for the integers.
    pub fn elements(&self) -> Option<Vec<GroupElement>> {
        match self {
            GroupSpec::Cyclic(n) => Some((0..*n).map(GroupElement::Residue).collect()),
            GroupSpec::Integers => None,
            GroupSpec::Table(tab) => Some((0..tab.len()).map(GroupElement::Index).collect()),
        }
    }

    /// Textual encoding: decimal residue, signed decimal, or element name.
    pub fn format(&self, t: GroupElement) -> String {
        match (self, t) {
            (GroupSpec::Table(tab), GroupElement::Index(i)) if i < tab.len() => tab.names[i].clone(),
            (_, GroupElement::Residue(r)) => r.to_string(),
            (_, GroupElement::Int(n)) => n.to_string(),
            (_, GroupElement::Index(i)) => format!("#{i}"),
        }
    }

    pub fn parse(&self, text: &str) -> Result<GroupElement, GroupError> {
        let err = || GroupError::Parse {
            text: text.to_string(),
            group: self.to_string(),
        };
        let t = match self {
            GroupSpec::Cyclic(_) => {
                if text.is_empty() || !text.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(err());
                }
                GroupElement::Residue(text.parse().map_err(|_| err())?)
            }
            GroupSpec::Integers => GroupElement::Int(text.parse().map_err(|_| err())?),
            GroupSpec::Table(tab) => GroupElement::Index(*tab.index.get(text).ok_or_else(err)?),
        };
        if self.contains(t) {
            Ok(t)
        } else {
            Err(err())
        }
    }
}
