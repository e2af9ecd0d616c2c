//! Finite groups given by multiplication tables, plus the stabilizer subsets
//! (closed under inversion and conjugation) that constrain meridian colors.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// Dense index of a group element.
pub type Elem = usize;

/// A validated finite group. Immutable after construction.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<Elem>,
    names: Vec<String>,
    identity: Elem,
    inverse: Vec<Elem>,
    class_of: Vec<usize>,
    classes: Vec<Vec<Elem>>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("order", &self.order)
            .field("names", &self.names)
            .finish()
    }
}

/// A subset of a group closed under inverses and conjugation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerSet {
    members: BTreeSet<Elem>,
}

impl StabilizerSet {
    /// Checks closure against `group` before wrapping.
    pub fn new(group: &FiniteGroup, members: impl IntoIterator<Item = Elem>) -> Result<Self> {
        let members: BTreeSet<Elem> = members.into_iter().collect();
        if !group.is_closed_subset(&members)? {
            return Err(Error::NotClosed);
        }
        Ok(Self { members })
    }

    /// The whole group; every coloring satisfies it.
    pub fn full(group: &FiniteGroup) -> Self {
        Self {
            members: (0..group.order()).collect(),
        }
    }

    pub fn contains(&self, g: Elem) -> bool {
        self.members.contains(&g)
    }

    pub fn members(&self) -> impl Iterator<Item = Elem> + '_ {
        self.members.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

impl FiniteGroup {
    /// Builds a group from a row-major multiplication table, `table[a][b] = a*b`.
    pub fn new(table: Vec<Vec<Elem>>, names: Vec<String>) -> Result<Self> {
        let n = names.len();
        if n == 0 {
            return Err(Error::NotAGroup("empty element list".into()));
        }
        if table.len() != n || table.iter().any(|row| row.len() != n) {
            return Err(Error::NotAGroup(format!(
                "table must be {n}x{n} to match {n} element names"
            )));
        }
        for (a, row) in table.iter().enumerate() {
            for (b, &c) in row.iter().enumerate() {
                if c >= n {
                    return Err(Error::NotAGroup(format!(
                        "product {}*{} = {c} is out of range",
                        names[a], names[b]
                    )));
                }
            }
        }
        let flat: Vec<Elem> = table.into_iter().flatten().collect();
        let mul = |a: Elem, b: Elem| flat[a * n + b];

        let identity = (0..n)
            .find(|&e| (0..n).all(|g| mul(e, g) == g && mul(g, e) == g))
            .ok_or_else(|| Error::NotAGroup("no two-sided identity".into()))?;

        let mut inverse = vec![0; n];
        for g in 0..n {
            inverse[g] = (0..n)
                .find(|&h| mul(g, h) == identity && mul(h, g) == identity)
                .ok_or_else(|| Error::NotAGroup(format!("element {} has no inverse", names[g])))?;
        }

        for a in 0..n {
            for b in 0..n {
                let ab = mul(a, b);
                for c in 0..n {
                    if mul(ab, c) != mul(a, mul(b, c)) {
                        return Err(Error::NotAGroup(format!(
                            "associativity fails for ({}, {}, {})",
                            names[a], names[b], names[c]
                        )));
                    }
                }
            }
        }

        let mut class_of = vec![usize::MAX; n];
        let mut classes = Vec::new();
        for g in 0..n {
            if class_of[g] != usize::MAX {
                continue;
            }
            let id = classes.len();
            let members: BTreeSet<Elem> = (0..n).map(|h| mul(mul(h, g), inverse[h])).collect();
            for &m in &members {
                class_of[m] = id;
            }
            classes.push(members.into_iter().collect());
        }

        Ok(Self {
            order: n,
            table: flat,
            names,
            identity,
            inverse,
            class_of,
            classes,
        })
    }

    pub fn trivial() -> Self {
        Self::new(vec![vec![0]], vec!["e".into()]).expect("trivial group")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> Elem {
        self.identity
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.table[a * self.order + b]
    }

    pub fn inv(&self, g: Elem) -> Elem {
        self.inverse[g]
    }

    /// `h g h⁻¹`
    pub fn conj(&self, h: Elem, g: Elem) -> Elem {
        self.mul(self.mul(h, g), self.inverse[h])
    }

    pub fn name(&self, g: Elem) -> &str {
        &self.names[g]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn element(&self, name: &str) -> Option<Elem> {
        self.names.iter().position(|n| n == name)
    }

    pub fn conjugacy_classes(&self) -> &[Vec<Elem>] {
        &self.classes
    }

    pub fn class_of(&self, g: Elem) -> usize {
        self.class_of[g]
    }

    pub fn is_involution(&self, g: Elem) -> bool {
        self.inverse[g] == g
    }

    /// True iff `s` is closed under inversion and under conjugation by every element.
    pub fn is_closed_subset(&self, s: &BTreeSet<Elem>) -> Result<bool> {
        if let Some(&bad) = s.iter().find(|&&g| g >= self.order) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                bound: self.order,
            });
        }
        Ok(s.iter()
            .all(|&g| s.contains(&self.inverse[g]) && (0..self.order).all(|h| s.contains(&self.conj(h, g)))))
    }
}

/// Σ₃ with elements `e, s12, s13, s23, r, r2` and the stabilizer set of its
/// three transpositions.
pub fn builtin_sigma3() -> (FiniteGroup, StabilizerSet) {
    // Permutations of {0,1,2} in one-line notation.
    let perms: [[usize; 3]; 6] = [
        [0, 1, 2], // e
        [1, 0, 2], // s12
        [2, 1, 0], // s13
        [0, 2, 1], // s23
        [1, 2, 0], // r
        [2, 0, 1], // r2
    ];
    let names = ["e", "s12", "s13", "s23", "r", "r2"];
    let group = group_from_permutations(&perms, &names);
    let inversions = StabilizerSet::new(&group, [1, 2, 3]).expect("transpositions form a class");
    (group, inversions)
}

/// Dihedral group of order `2n`, elements `r0..r{n-1}` (rotations) followed by
/// `f0..f{n-1}` (reflections `x ↦ k - x`). The stabilizer set is the reflections.
pub fn builtin_dihedral(n: usize) -> Result<(FiniteGroup, StabilizerSet)> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("dihedral group needs n >= 3, got {n}")));
    }
    // (reflect, k) acts on Z_n as x ↦ ±x + k; composition (a∘b)(x) = a(b(x)).
    let elems: Vec<(bool, usize)> = (0..n).map(|k| (false, k)).chain((0..n).map(|k| (true, k))).collect();
    let index = |e: (bool, usize)| if e.0 { n + e.1 } else { e.1 };
    let mut table = vec![vec![0; 2 * n]; 2 * n];
    for (i, &(ra, ka)) in elems.iter().enumerate() {
        for (j, &(rb, kb)) in elems.iter().enumerate() {
            let shifted = if ra { (n - kb) % n } else { kb };
            table[i][j] = index((ra ^ rb, (ka + shifted) % n));
        }
    }
    let names = (0..n)
        .map(|k| format!("r{k}"))
        .chain((0..n).map(|k| format!("f{k}")))
        .collect();
    let group = FiniteGroup::new(table, names)?;
    let reflections = StabilizerSet::new(&group, n..2 * n)?;
    Ok((group, reflections))
}

fn group_from_permutations(perms: &[[usize; 3]], names: &[&str]) -> FiniteGroup {
    let find = |p: [usize; 3]| perms.iter().position(|q| *q == p).expect("closed");
    // (a*b)(x) = a(b(x))
    let table = perms
        .iter()
        .map(|a| perms.iter().map(|b| find([a[b[0]], a[b[1]], a[b[2]]])).collect())
        .collect();
    FiniteGroup::new(table, names.iter().map(|s| s.to_string()).collect()).expect("Σ₃ is a group")
}

/// Resolves a group token: `sigma3` or `dihedral:<n>`.
pub fn group_from_token(token: &str) -> Result<(FiniteGroup, StabilizerSet)> {
    match token {
        "sigma3" => Ok(builtin_sigma3()),
        _ => {
            if let Some(n) = token.strip_prefix("dihedral:") {
                let n: usize = n
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("bad dihedral order `{n}`")))?;
                builtin_dihedral(n)
            } else {
                Err(Error::InvalidParameter(format!("unknown group token `{token}`")))
            }
        }
    }
}

/// Parses a table file: a header line of element names, then one row per
/// element giving the products `row * column` by name.
pub fn parse_group_table(text: &str) -> Result<FiniteGroup> {
    let mut lines = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty());
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::NotAGroup("missing header line".into()))?
        .split_whitespace()
        .map(str::to_string)
        .collect();
    let lookup = |tok: &str| {
        header
            .iter()
            .position(|h| h == tok)
            .ok_or_else(|| Error::NotAGroup(format!("unknown element `{tok}` in table")))
    };
    let table = lines
        .map(|l| l.split_whitespace().map(lookup).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    FiniteGroup::new(table, header)
}
