//! Oriented planar link diagrams in planar-diagram form.
//!
//! Every edge of the projection (a strand segment between two consecutive
//! crossing passages) carries a positive label. Labels run consecutively along
//! each component in the direction of its orientation, so a component is a
//! contiguous label range and `next_arc` wraps from the last label back to the
//! first. A crossing lists its four edge labels counterclockwise, starting at
//! the incoming under-edge; its sign is +1 when the over-strand runs from slot 3
//! to slot 1.
//!
//! Crossingless components are stored separately as loops.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};

pub type ArcId = u32;

/// A position on a crossing: `(crossing index, slot)`.
pub type Dart = (usize, usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Crossing {
    pub slots: [ArcId; 4],
    pub sign: i8,
}

impl Crossing {
    pub fn under_in(&self) -> ArcId {
        self.slots[0]
    }

    pub fn under_out(&self) -> ArcId {
        self.slots[2]
    }

    pub fn over_in_slot(&self) -> usize {
        if self.sign > 0 {
            3
        } else {
            1
        }
    }

    pub fn over_out_slot(&self) -> usize {
        if self.sign > 0 {
            1
        } else {
            3
        }
    }

    pub fn over_in(&self) -> ArcId {
        self.slots[self.over_in_slot()]
    }

    pub fn over_out(&self) -> ArcId {
        self.slots[self.over_out_slot()]
    }

    /// True when `slot` points along the edge away from this crossing.
    pub fn is_outgoing(&self, slot: usize) -> bool {
        slot == 2 || slot == self.over_out_slot()
    }

    pub fn is_over(slot: usize) -> bool {
        slot % 2 == 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinkDiagram {
    crossings: Vec<Crossing>,
    loops: Vec<ArcId>,
    num_arcs: u32,
    /// Inclusive label ranges, sorted.
    components: Vec<(ArcId, ArcId)>,
}

impl LinkDiagram {
    /// Builds and validates a diagram whose crossing signs are already known.
    pub fn new(crossings: Vec<Crossing>, loops: Vec<ArcId>) -> Result<Self> {
        let num_arcs = check_labels(&crossings, &loops)?;
        let components = component_ranges(&crossings, &loops, num_arcs)?;
        let d = Self {
            crossings,
            loops,
            num_arcs,
            components,
        };
        d.check_structure()?;
        d.check_planarity()?;
        Ok(d)
    }

    /// Builds a diagram from bare crossing slot lists, deriving each sign from
    /// the label numbering. Orientation of a component that only ever passes
    /// over on exactly two edges is not recorded by the labels; it is fixed by
    /// reading the first such crossing as running from slot 1 to slot 3.
    pub fn from_pd(slots: Vec<[ArcId; 4]>, loops: Vec<ArcId>) -> Result<Self> {
        let provisional: Vec<Crossing> = slots.iter().map(|&s| Crossing { slots: s, sign: -1 }).collect();
        let num_arcs = check_labels(&provisional, &loops)?;
        let components = component_ranges(&provisional, &loops, num_arcs)?;
        let signs = infer_signs(&slots, &components, num_arcs)?;
        let crossings = slots
            .into_iter()
            .zip(signs)
            .map(|(slots, sign)| Crossing { slots, sign })
            .collect();
        let d = Self {
            crossings,
            loops,
            num_arcs,
            components,
        };
        d.check_structure()?;
        d.check_planarity()?;
        Ok(d)
    }

    pub fn unknot() -> Self {
        Self::new(vec![], vec![1]).expect("unknot")
    }

    pub fn empty() -> Self {
        Self {
            crossings: vec![],
            loops: vec![],
            num_arcs: 0,
            components: vec![],
        }
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn loops(&self) -> &[ArcId] {
        &self.loops
    }

    pub fn num_arcs(&self) -> u32 {
        self.num_arcs
    }

    pub fn num_crossings(&self) -> usize {
        self.crossings.len()
    }

    pub fn components(&self) -> &[(ArcId, ArcId)] {
        &self.components
    }

    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    pub fn arcs(&self) -> impl Iterator<Item = ArcId> {
        1..=self.num_arcs
    }

    pub fn component_of(&self, arc: ArcId) -> usize {
        self.components
            .iter()
            .position(|&(lo, hi)| lo <= arc && arc <= hi)
            .expect("arc in range")
    }

    pub fn next_arc(&self, arc: ArcId) -> ArcId {
        let (lo, hi) = self.components[self.component_of(arc)];
        if arc == hi {
            lo
        } else {
            arc + 1
        }
    }

    pub fn prev_arc(&self, arc: ArcId) -> ArcId {
        let (lo, hi) = self.components[self.component_of(arc)];
        if arc == lo {
            hi
        } else {
            arc - 1
        }
    }

    pub fn is_loop(&self, arc: ArcId) -> bool {
        self.loops.contains(&arc)
    }

    /// For each arc (index `arc - 1`): `[tail, head]` darts, `None` for loops.
    pub fn ends(&self) -> Vec<Option<[Dart; 2]>> {
        let mut tails = vec![None; self.num_arcs as usize];
        let mut heads = vec![None; self.num_arcs as usize];
        for (i, c) in self.crossings.iter().enumerate() {
            for s in 0..4 {
                let a = c.slots[s] as usize - 1;
                if c.is_outgoing(s) {
                    tails[a] = Some((i, s));
                } else {
                    heads[a] = Some((i, s));
                }
            }
        }
        tails
            .into_iter()
            .zip(heads)
            .map(|(t, h)| match (t, h) {
                (Some(t), Some(h)) => Some([t, h]),
                _ => None,
            })
            .collect()
    }

    /// The dart at the other end of the edge leaving through `dart`.
    pub fn opposite(&self, ends: &[Option<[Dart; 2]>], dart: Dart) -> Dart {
        let arc = self.crossings[dart.0].slots[dart.1];
        let [t, h] = ends[arc as usize - 1].expect("crossing arc");
        if t == dart {
            h
        } else {
            t
        }
    }

    /// Faces as cyclic dart sequences. Walking out of a crossing along a dart,
    /// the face lies on the left.
    pub fn faces(&self) -> Vec<Vec<Dart>> {
        let ends = self.ends();
        let mut seen = vec![[false; 4]; self.crossings.len()];
        let mut faces = Vec::new();
        for i in 0..self.crossings.len() {
            for s in 0..4 {
                if seen[i][s] {
                    continue;
                }
                let mut face = Vec::new();
                let mut d = (i, s);
                while !seen[d.0][d.1] {
                    seen[d.0][d.1] = true;
                    face.push(d);
                    let (x, t) = self.opposite(&ends, d);
                    d = (x, (t + 3) % 4);
                }
                faces.push(face);
            }
        }
        faces
    }

    /// Connected components of the projection graph, as sorted crossing lists.
    pub fn projection_components(&self) -> Vec<Vec<usize>> {
        let n = self.crossings.len();
        let mut uf = UnionFind::new(n);
        let ends = self.ends();
        for e in ends.iter().flatten() {
            uf.union(e[0].0, e[1].0);
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..n {
            groups.entry(uf.find(i)).or_default().push(i);
        }
        let mut out: Vec<Vec<usize>> = groups.into_values().collect();
        out.sort();
        out
    }

    /// Re-runs every structural check.
    pub fn validate(&self) -> Result<()> {
        let rebuilt = Self::new(self.crossings.clone(), self.loops.clone())?;
        if rebuilt.components != self.components {
            return Err(Error::Validation("component table is stale".into()));
        }
        Ok(())
    }

    fn check_structure(&self) -> Result<()> {
        let mut head_seen = vec![0u8; self.num_arcs as usize];
        for (i, c) in self.crossings.iter().enumerate() {
            if c.sign != 1 && c.sign != -1 {
                return Err(Error::Validation(format!("crossing {i}: sign must be ±1")));
            }
            let [a, b, cc, d] = c.slots;
            if cc != self.next_arc(a) {
                return Err(Error::Validation(format!(
                    "crossing {i}: under-strand slots 0 and 2 must hold consecutive arcs ({a} then {cc})"
                )));
            }
            let (oi, oo) = (c.over_in(), c.over_out());
            if oo != self.next_arc(oi) {
                return Err(Error::Validation(format!(
                    "crossing {i}: over-strand {oi} -> {oo} disagrees with arc numbering ({b}, {d})"
                )));
            }
            head_seen[a as usize - 1] += 1;
            head_seen[oi as usize - 1] += 1;
        }
        for (lo, hi) in &self.components {
            if self.loops.contains(lo) {
                continue;
            }
            for a in *lo..=*hi {
                if head_seen[a as usize - 1] != 1 {
                    return Err(Error::Validation(format!(
                        "arc {a} must end at exactly one crossing passage"
                    )));
                }
            }
        }
        Ok(())
    }

    fn check_planarity(&self) -> Result<()> {
        let faces = self.faces();
        let comps = self.projection_components();
        let mut face_comp = vec![0usize; comps.len()];
        let mut comp_of = vec![0usize; self.crossings.len()];
        for (k, comp) in comps.iter().enumerate() {
            for &x in comp {
                comp_of[x] = k;
            }
        }
        for f in &faces {
            face_comp[comp_of[f[0].0]] += 1;
        }
        for (k, comp) in comps.iter().enumerate() {
            let v = comp.len() as i64;
            let e = 2 * v;
            let f = face_comp[k] as i64;
            if v - e + f != 2 {
                return Err(Error::Validation(format!(
                    "Euler check failed on the component containing crossing {}: V - E + F = {} - {} + {} != 2",
                    comp[0], v, e, f
                )));
            }
        }
        Ok(())
    }

    /// Flips every crossing; labels are kept.
    pub fn mirror(&self) -> LinkDiagram {
        let crossings = self
            .crossings
            .iter()
            .map(|c| {
                let [a, b, cc, d] = c.slots;
                if c.sign > 0 {
                    Crossing {
                        slots: [d, a, b, cc],
                        sign: -1,
                    }
                } else {
                    Crossing {
                        slots: [b, cc, d, a],
                        sign: 1,
                    }
                }
            })
            .collect();
        let out = LinkDiagram {
            crossings,
            loops: self.loops.clone(),
            num_arcs: self.num_arcs,
            components: self.components.clone(),
        };
        debug_assert!(out.validate().is_ok());
        out
    }

    /// Places `other` beside `self` with its labels shifted past ours.
    pub fn untangled_union(&self, other: &LinkDiagram) -> LinkDiagram {
        let shift = self.num_arcs;
        let mut crossings = self.crossings.clone();
        crossings.extend(other.crossings.iter().map(|c| Crossing {
            slots: c.slots.map(|a| a + shift),
            sign: c.sign,
        }));
        let mut loops = self.loops.clone();
        loops.extend(other.loops.iter().map(|a| a + shift));
        let mut components = self.components.clone();
        components.extend(other.components.iter().map(|&(lo, hi)| (lo + shift, hi + shift)));
        LinkDiagram {
            crossings,
            loops,
            num_arcs: self.num_arcs + other.num_arcs,
            components,
        }
    }

    /// Sum of crossing signs over pairs of distinct components.
    pub fn linking_sum(&self) -> i64 {
        self.crossings
            .iter()
            .filter(|c| self.component_of(c.under_in()) != self.component_of(c.over_in()))
            .map(|c| c.sign as i64)
            .sum()
    }

    pub fn writhe(&self) -> i64 {
        self.crossings.iter().map(|c| c.sign as i64).sum()
    }
}

fn check_labels(crossings: &[Crossing], loops: &[ArcId]) -> Result<u32> {
    let mut count: BTreeMap<ArcId, usize> = BTreeMap::new();
    for c in crossings {
        for &a in &c.slots {
            if a == 0 {
                return Err(Error::Validation("arc labels start at 1".into()));
            }
            *count.entry(a).or_default() += 1;
        }
    }
    for &l in loops {
        if l == 0 {
            return Err(Error::Validation("arc labels start at 1".into()));
        }
        if count.contains_key(&l) {
            return Err(Error::Validation(format!("loop {l} reuses a crossing arc label")));
        }
        *count.entry(l).or_default() += 2;
    }
    for (&a, &n) in &count {
        if n != 2 {
            return Err(Error::Validation(format!(
                "arc {a} occurs {} time(s); every arc must join exactly two crossing slots",
                if loops.contains(&a) { n - 1 } else { n }
            )));
        }
    }
    let n = count.len() as u32;
    if let Some((&max, _)) = count.iter().next_back() {
        if max != n {
            return Err(Error::Validation(format!("arc labels must be 1..={n}, found {max}")));
        }
    }
    Ok(n)
}

fn component_ranges(crossings: &[Crossing], loops: &[ArcId], num_arcs: u32) -> Result<Vec<(ArcId, ArcId)>> {
    let mut uf = UnionFind::new(num_arcs as usize + 1);
    for c in crossings {
        uf.union(c.slots[0] as usize, c.slots[2] as usize);
        uf.union(c.slots[1] as usize, c.slots[3] as usize);
    }
    let mut groups: BTreeMap<usize, Vec<ArcId>> = BTreeMap::new();
    for a in 1..=num_arcs {
        groups.entry(uf.find(a as usize)).or_default().push(a);
    }
    let mut out = Vec::new();
    for arcs in groups.values() {
        let (lo, hi) = (arcs[0], *arcs.last().unwrap());
        if (hi - lo + 1) as usize != arcs.len() {
            return Err(Error::Validation(format!(
                "arcs of the component containing {lo} are not numbered consecutively"
            )));
        }
        if arcs.len() == 1 && !loops.contains(&lo) {
            return Err(Error::Validation(format!(
                "arc {lo} forms a component with a single crossing passage"
            )));
        }
        out.push((lo, hi));
    }
    out.sort();
    Ok(out)
}

/// Decides each crossing's sign from the arc numbering; see `LinkDiagram::from_pd`.
fn infer_signs(slots: &[[ArcId; 4]], components: &[(ArcId, ArcId)], num_arcs: u32) -> Result<Vec<i8>> {
    let next = |a: ArcId| {
        let &(lo, hi) = components.iter().find(|&&(lo, hi)| lo <= a && a <= hi).unwrap();
        if a == hi {
            lo
        } else {
            a + 1
        }
    };
    // occurrences of each arc in over slots: (crossing, slot)
    let mut over_occ: Vec<Vec<(usize, usize)>> = vec![Vec::new(); num_arcs as usize + 1];
    // role of each arc end: Some(true) = head at an under slot, tail known, etc.
    let mut head_at_under = vec![false; num_arcs as usize + 1];
    let mut tail_at_under = vec![false; num_arcs as usize + 1];
    for (i, s) in slots.iter().enumerate() {
        head_at_under[s[0] as usize] = true;
        tail_at_under[s[2] as usize] = true;
        over_occ[s[1] as usize].push((i, 1));
        over_occ[s[3] as usize].push((i, 3));
    }
    let mut sign: Vec<Option<i8>> = vec![None; slots.len()];
    for (i, s) in slots.iter().enumerate() {
        if s[2] != next(s[0]) {
            return Err(Error::Validation(format!(
                "crossing {i}: under-strand slots 0 and 2 must hold consecutive arcs ({} then {})",
                s[0], s[2]
            )));
        }
        let (b, d) = (s[1], s[3]);
        let bd = next(b) == d;
        let db = next(d) == b;
        sign[i] = match (bd, db) {
            (true, false) => Some(-1),
            (false, true) => Some(1),
            (false, false) => {
                return Err(Error::Validation(format!(
                    "crossing {i}: over-strand arcs {b} and {d} are not consecutive"
                )))
            }
            (true, true) => None,
        };
    }
    // Propagate: an arc has one head and one tail overall.
    loop {
        let mut changed = false;
        for i in 0..slots.len() {
            if sign[i].is_some() {
                continue;
            }
            let b = slots[i][1] as usize;
            // is b's head elsewhere?
            let b_head_elsewhere = head_at_under[b]
                || over_occ[b]
                    .iter()
                    .any(|&(j, t)| j != i && sign[j].map(|sg| (sg > 0 && t == 3) || (sg < 0 && t == 1)) == Some(true));
            let b_tail_elsewhere = tail_at_under[b]
                || over_occ[b]
                    .iter()
                    .any(|&(j, t)| j != i && sign[j].map(|sg| (sg > 0 && t == 1) || (sg < 0 && t == 3)) == Some(true));
            if b_head_elsewhere {
                sign[i] = Some(1);
                changed = true;
            } else if b_tail_elsewhere {
                sign[i] = Some(-1);
                changed = true;
            }
        }
        if !changed {
            match sign.iter().position(Option::is_none) {
                Some(i) => sign[i] = Some(-1),
                None => break,
            }
        }
    }
    Ok(sign.into_iter().map(Option::unwrap).collect())
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

// ---------------------------------------------------------------------------
// KLD text format

/// Optional coloring block attached to a KLD file.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ColorBlock {
    pub group: Option<String>,
    /// `(arc, token)` in file order.
    pub entries: Vec<(ArcId, String)>,
}

/// Parses a KLD document into a diagram and its optional coloring block.
pub fn parse_kld(text: &str) -> Result<(LinkDiagram, ColorBlock)> {
    let mut lines = text.split('\n').enumerate();
    let mut header_seen = false;
    let mut slots = Vec::new();
    let mut loops = Vec::new();
    let mut block = ColorBlock::default();

    let syntax = |line: usize, col: usize, expected: &str| Error::Syntax {
        line: line + 1,
        col: col + 1,
        expected: expected.to_string(),
    };

    for (ln, raw) in lines.by_ref() {
        let content = raw.split('#').next().unwrap_or("").trim_end_matches('\r');
        let tokens = tokenize(content);
        if tokens.is_empty() {
            continue;
        }
        if !header_seen {
            if tokens.len() != 2 || tokens[0].1 != "kld" || tokens[1].1 != "1" {
                return Err(syntax(ln, tokens[0].0, "version line `kld 1`"));
            }
            header_seen = true;
            continue;
        }
        let (col0, kw) = tokens[0];
        let num = |idx: usize| -> Result<ArcId> {
            let (c, t) = *tokens.get(idx).ok_or_else(|| syntax(ln, content.len(), "arc index"))?;
            match t.parse::<ArcId>() {
                Ok(v) if v >= 1 => Ok(v),
                _ => Err(syntax(ln, c, "arc index >= 1")),
            }
        };
        let arity = |n: usize| -> Result<()> {
            if tokens.len() > n {
                Err(syntax(ln, tokens[n].0, "end of line"))
            } else {
                Ok(())
            }
        };
        match kw {
            "X" => {
                let s = [num(1)?, num(2)?, num(3)?, num(4)?];
                arity(5)?;
                slots.push(s);
            }
            "U" => {
                loops.push(num(1)?);
                arity(2)?;
            }
            "C" => {
                let arc = num(1)?;
                let (_, tok) = *tokens.get(2).ok_or_else(|| syntax(ln, content.len(), "color token"))?;
                arity(3)?;
                block.entries.push((arc, tok.to_string()));
            }
            "G" => {
                let (_, tok) = *tokens.get(1).ok_or_else(|| syntax(ln, content.len(), "group token"))?;
                arity(2)?;
                block.group = Some(tok.to_string());
            }
            _ => return Err(syntax(ln, col0, "one of X, U, C, G")),
        }
    }
    if !header_seen {
        return Err(syntax(0, 0, "version line `kld 1`"));
    }
    let d = LinkDiagram::from_pd(slots, loops)?;
    Ok((d, block))
}

fn tokenize(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out
}

/// Canonical KLD text: header, `X` lines in stored order, then `U` lines.
pub fn serialize_kld(d: &LinkDiagram) -> String {
    let mut out = String::from("kld 1\n");
    for c in &d.crossings {
        let [a, b, cc, dd] = c.slots;
        let _ = writeln!(out, "X {a} {b} {cc} {dd}");
    }
    for l in &d.loops {
        let _ = writeln!(out, "U {l}");
    }
    out
}

/// KLD text followed by a coloring block.
pub fn serialize_kld_colored(d: &LinkDiagram, group_token: &str, tokens: &[String]) -> String {
    let mut out = serialize_kld(d);
    let _ = writeln!(out, "G {group_token}");
    for (i, t) in tokens.iter().enumerate() {
        let _ = writeln!(out, "C {} {t}", i + 1);
    }
    out
}
