//! Canonical forms and bounded breadth-first equivalence search.

use std::collections::HashMap;

use crate::coloring::GColoring;
use crate::diagram::{ArcId, LinkDiagram};
use crate::error::{Error, Result};
use crate::group::{Elem, FiniteGroup};
use crate::moves::{applicable_moves, apply_move, MoveEvent};

pub const DEFAULT_MAX_STATES: usize = 1_000_000;
/// Largest diagram `canonical_form` accepts.
pub const CANONICAL_CROSSING_LIMIT: usize = 64;

/// Serialization of a colored diagram that is invariant under relabeling.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm(pub Vec<u32>);

pub fn canonical_form(d: &LinkDiagram, psi: &GColoring) -> Result<CanonicalForm> {
    if d.num_crossings() > CANONICAL_CROSSING_LIMIT {
        return Err(Error::ResourceBound(format!(
            "canonical form limited to {CANONICAL_CROSSING_LIMIT} crossings"
        )));
    }
    let ends = d.ends();
    let mut parts: Vec<Vec<u32>> = Vec::new();
    for comp in d.projection_components() {
        let mut arcs: Vec<ArcId> = Vec::new();
        for &x in &comp {
            for &a in &d.crossings()[x].slots {
                if !arcs.contains(&a) {
                    arcs.push(a);
                }
            }
        }
        let best = arcs
            .iter()
            .map(|&start| code_from(d, &ends, psi, start))
            .min()
            .expect("nonempty component");
        parts.push(best);
    }
    let mut loops: Vec<u32> = d.loops().iter().map(|&l| psi.get(l) as u32).collect();
    loops.sort();
    parts.sort();
    let mut out = vec![loops.len() as u32];
    out.extend(loops);
    for p in parts {
        out.push(p.len() as u32);
        out.extend(p);
    }
    Ok(CanonicalForm(out))
}

/// Relabels one projection component starting at `start`: components are
/// numbered in order of discovery, each from the first edge seen.
fn code_from(d: &LinkDiagram, ends: &[Option<[(usize, usize); 2]>], psi: &GColoring, start: ArcId) -> Vec<u32> {
    let n = d.num_arcs() as usize;
    let mut label = vec![0u32; n + 1];
    let mut next = 1u32;
    let mut order: Vec<usize> = Vec::new();
    let mut seen_x = vec![false; d.num_crossings()];
    let mut pending = vec![start];
    let mut qi = 0;
    while let Some(s) = pending.pop() {
        if label[s as usize] != 0 {
            continue;
        }
        let mut a = s;
        loop {
            label[a as usize] = next;
            next += 1;
            let [_, (x, _)] = ends[a as usize - 1].unwrap();
            if !seen_x[x] {
                seen_x[x] = true;
                order.push(x);
            }
            a = d.next_arc(a);
            if a == s {
                break;
            }
        }
        // next undiscovered component: first unlabeled slot of the earliest crossing
        while qi < order.len() && pending.is_empty() {
            let c = &d.crossings()[order[qi]];
            if let Some(&b) = c.slots.iter().find(|&&b| label[b as usize] == 0) {
                pending.push(b);
            } else {
                qi += 1;
            }
        }
    }
    let mut xs: Vec<[u32; 5]> = order
        .iter()
        .map(|&x| {
            let c = &d.crossings()[x];
            let s = c.slots.map(|a| label[a as usize]);
            [s[0], s[1], s[2], s[3], (c.sign > 0) as u32]
        })
        .collect();
    xs.sort();
    let mut colors = vec![0u32; next as usize - 1];
    for a in 1..=n {
        if label[a] != 0 {
            colors[label[a] as usize - 1] = psi.get(a as u32) as u32;
        }
    }
    let mut out: Vec<u32> = xs.into_iter().flatten().collect();
    out.extend(colors);
    out
}

/// Outcome of a bounded search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reachable {
    pub forms: Vec<CanonicalForm>,
    /// True when `max_states` stopped the search early.
    pub partial: bool,
}

struct Bfs<'a> {
    g: &'a FiniteGroup,
    max_crossings: usize,
    /// canonical form -> (parent index, move from parent)
    index: HashMap<CanonicalForm, usize>,
    nodes: Vec<(Option<(usize, MoveEvent)>, CanonicalForm)>,
    frontier: Vec<(usize, LinkDiagram, GColoring)>,
}

impl<'a> Bfs<'a> {
    fn new(g: &'a FiniteGroup, d: &LinkDiagram, psi: &GColoring, max_crossings: usize) -> Result<Self> {
        let root = canonical_form(d, psi)?;
        let mut index = HashMap::new();
        index.insert(root.clone(), 0);
        Ok(Bfs {
            g,
            max_crossings,
            index,
            nodes: vec![(None, root)],
            frontier: vec![(0, d.clone(), psi.clone())],
        })
    }

    /// Expands one level. Returns false if the state budget was hit.
    fn step(&mut self, max_states: usize) -> Result<bool> {
        let mut next = Vec::new();
        for (id, d, psi) in std::mem::take(&mut self.frontier) {
            for m in applicable_moves(&d, self.g, &psi) {
                if added_crossings(&m) + d.num_crossings() > self.max_crossings {
                    continue;
                }
                let (d2, p2) = apply_move(&d, self.g, &psi, &m)?;
                if d2.num_crossings() > self.max_crossings {
                    continue;
                }
                let form = canonical_form(&d2, &p2)?;
                if self.index.contains_key(&form) {
                    continue;
                }
                if self.nodes.len() >= max_states {
                    self.frontier = next;
                    return Ok(false);
                }
                self.index.insert(form.clone(), self.nodes.len());
                self.nodes.push((Some((id, m)), form));
                next.push((self.nodes.len() - 1, d2, p2));
            }
        }
        self.frontier = next;
        Ok(true)
    }

    fn path_to(&self, mut id: usize) -> Vec<MoveEvent> {
        let mut path = Vec::new();
        while let Some((p, m)) = &self.nodes[id].0 {
            path.push(m.clone());
            id = *p;
        }
        path.reverse();
        path
    }
}

fn added_crossings(m: &MoveEvent) -> usize {
    match m {
        MoveEvent::R1Add { .. } => 1,
        MoveEvent::R2Add { .. } => 2,
        _ => 0,
    }
}

/// Canonical forms reachable from `(d, psi)` without exceeding `max_crossings`.
pub fn reachable_set(
    d: &LinkDiagram,
    g: &FiniteGroup,
    psi: &GColoring,
    max_crossings: usize,
    max_states: usize,
) -> Result<Reachable> {
    let mut bfs = Bfs::new(g, d, psi, max_crossings)?;
    let mut partial = false;
    while !bfs.frontier.is_empty() {
        if !bfs.step(max_states)? {
            partial = true;
            break;
        }
    }
    let mut forms: Vec<CanonicalForm> = bfs.nodes.into_iter().map(|n| n.1).collect();
    forms.sort();
    Ok(Reachable { forms, partial })
}

/// Breadth-first search from `(d, psi)` for the first state satisfying `goal`.
pub fn find_path(
    d: &LinkDiagram,
    g: &FiniteGroup,
    psi: &GColoring,
    max_crossings: usize,
    max_states: usize,
    goal: impl Fn(&LinkDiagram, &GColoring) -> bool,
) -> Result<Search> {
    if goal(d, psi) {
        return Ok(Search::Found(vec![]));
    }
    let mut bfs = Bfs::new(g, d, psi, max_crossings)?;
    while !bfs.frontier.is_empty() {
        let before = bfs.nodes.len();
        let ok = bfs.step(max_states)?;
        if let Some(i) = bfs.frontier.iter().find(|(_, d, p)| goal(d, p)).map(|f| f.0) {
            debug_assert!(i >= before);
            return Ok(Search::Found(bfs.path_to(i)));
        }
        if !ok {
            return Err(Error::ResourceBound(format!("search exceeded {max_states} states")));
        }
    }
    Ok(Search::NotFound)
}

/// Path to a crossingless diagram.
pub fn find_unlink(
    d: &LinkDiagram,
    g: &FiniteGroup,
    psi: &GColoring,
    max_crossings: usize,
    max_states: usize,
) -> Result<Search> {
    find_path(d, g, psi, max_crossings, max_states, |d, _| d.num_crossings() == 0)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Search {
    Found(Vec<MoveEvent>),
    NotFound,
}

/// Searches outward from both diagrams a level at a time until the explored
/// sets meet. The returned path replays from `(d1, psi1)` to a diagram with
/// the canonical form of `(d2, psi2)`.
pub fn prove_equivalent(
    g: &FiniteGroup,
    (d1, psi1): (&LinkDiagram, &GColoring),
    (d2, psi2): (&LinkDiagram, &GColoring),
    max_crossings: usize,
    max_states: usize,
) -> Result<Search> {
    let mut a = Bfs::new(g, d1, psi1, max_crossings)?;
    let mut b = Bfs::new(g, d2, psi2, max_crossings)?;
    let half = (max_states / 2).max(1);
    loop {
        if let Some((ia, ib)) = meeting(&a, &b) {
            let mut path = a.path_to(ia);
            let back = b.path_to(ib);
            path.extend(invert_path(g, d1, psi1, &path, d2, psi2, &back)?);
            return Ok(Search::Found(path));
        }
        if a.frontier.is_empty() && b.frontier.is_empty() {
            return Ok(Search::NotFound);
        }
        let ok_a = a.frontier.is_empty() || a.step(half)?;
        let ok_b = b.frontier.is_empty() || b.step(half)?;
        if !(ok_a && ok_b) {
            if meeting(&a, &b).is_some() {
                continue;
            }
            return Err(Error::ResourceBound(format!(
                "equivalence search exceeded {max_states} states"
            )));
        }
    }
}

/// Smallest meeting point by (a-index, b-index).
fn meeting(a: &Bfs, b: &Bfs) -> Option<(usize, usize)> {
    a.nodes
        .iter()
        .enumerate()
        .filter_map(|(i, (_, f))| b.index.get(f).map(|&j| (i, j)))
        .min_by_key(|&(i, j)| (i.max(j), i, j))
}

/// Turns the b-side path (from `d2` to the meeting state) into moves leading
/// from the end of `prefix` back to `d2`.
fn invert_path(
    g: &FiniteGroup,
    d1: &LinkDiagram,
    psi1: &GColoring,
    prefix: &[MoveEvent],
    d2: &LinkDiagram,
    psi2: &GColoring,
    back: &[MoveEvent],
) -> Result<Vec<MoveEvent>> {
    // forms along the b path: f0 = d2, ..., fk = meeting state
    let mut forms = vec![canonical_form(d2, psi2)?];
    let mut cur = (d2.clone(), psi2.clone());
    for m in back {
        cur = apply_move(&cur.0, g, &cur.1, m)?;
        forms.push(canonical_form(&cur.0, &cur.1)?);
    }
    let (mut d, mut psi) = crate::moves::replay(d1, g, psi1, prefix)?;
    let mut out = Vec::new();
    for want in forms.iter().rev().skip(1) {
        let mut found = None;
        for m in applicable_moves(&d, g, &psi) {
            let (dn, pn) = apply_move(&d, g, &psi, &m)?;
            if canonical_form(&dn, &pn)? == *want {
                found = Some((m, dn, pn));
                break;
            }
        }
        let (m, dn, pn) =
            found.ok_or_else(|| Error::InvalidMove("a move on the reverse path has no listed inverse".into()))?;
        out.push(m);
        d = dn;
        psi = pn;
    }
    Ok(out)
}

/// Unlink of `n` crossingless loops with the given colors.
pub fn unlink(colors: &[Elem]) -> (LinkDiagram, GColoring) {
    let loops: Vec<u32> = (1..=colors.len() as u32).collect();
    (
        LinkDiagram::new(vec![], loops).expect("unlink"),
        GColoring::new(colors.to_vec()),
    )
}
