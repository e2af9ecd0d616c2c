//! Classification of tricolored links up to allowed surgeries.
//!
//! The engine works on an ordinary diagram and only ever changes it through
//! `apply_move` and the removal of split components, so its trace replays
//! exactly. Every crossing is first turned into a clasp, each conversion
//! splitting off a trefoil. Undoing all clasps leaves disjoint loops; an
//! innermost loop is cut down to degree at most 3 by saddles and then
//! eliminated, which lowers the clasp count.
//!
//! The basic tool is the 3-move on a twist region: three half-twists of one
//! handedness are pushed off as a split trefoil, so `k` crossings of sign `e`
//! become `k - 3` (that is, `3 - k` of sign `-e`).

use std::fmt;

use crate::coloring::{validate_coloring, GColoring};
use crate::diagram::{ArcId, Crossing, LinkDiagram};
use crate::error::{Error, Result};
use crate::group::{builtin_sigma3, Elem, FiniteGroup};
use crate::moves::{apply_move, apply_tracked, bigon, monogon_slot, Applied, MoveEvent, Regions, Side};
use crate::planar::Work;

pub const DEFAULT_STEP_LIMIT: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SplitKind {
    Right,
    Left,
    Loop,
}

impl fmt::Display for SplitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SplitKind::Right => "Right",
            SplitKind::Left => "Left",
            SplitKind::Loop => "Loop",
        })
    }
}

/// One line of a classification trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceLine {
    Move(MoveEvent),
    /// Removes the split component through `arc`.
    Split {
        kind: SplitKind,
        arc: ArcId,
    },
    /// Marks the elimination of a loop; no effect on the diagram.
    Elim {
        loop_id: usize,
        degree: usize,
    },
}

impl fmt::Display for TraceLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceLine::Move(m) => write!(f, "{m}"),
            TraceLine::Split { kind, arc } => write!(f, "SPLIT {kind} {arc}"),
            TraceLine::Elim { loop_id, degree } => write!(f, "ELIM {loop_id} {degree}"),
        }
    }
}

pub fn serialize_trace(trace: &[TraceLine]) -> String {
    trace.iter().map(|l| format!("{l}\n")).collect()
}

pub fn parse_trace(text: &str) -> Result<Vec<TraceLine>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |what: &str| Error::Syntax {
            line: n + 1,
            col: 1,
            expected: what.into(),
        };
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "SPLIT" => {
                let kind = match toks.get(1) {
                    Some(&"Right") => SplitKind::Right,
                    Some(&"Left") => SplitKind::Left,
                    Some(&"Loop") => SplitKind::Loop,
                    _ => return Err(bad("Right, Left or Loop")),
                };
                let arc = toks.get(2).and_then(|t| t.parse().ok()).ok_or_else(|| bad("arc"))?;
                if toks.len() != 3 {
                    return Err(bad("end of line"));
                }
                out.push(TraceLine::Split { kind, arc });
            }
            "ELIM" => {
                let num = |k: usize| toks.get(k).and_then(|t| t.parse().ok());
                match (num(1), num(2), toks.len()) {
                    (Some(loop_id), Some(degree), 3) => out.push(TraceLine::Elim { loop_id, degree }),
                    _ => return Err(bad("ELIM <loop-id> <degree>")),
                }
            }
            _ => {
                let m = crate::moves::parse_log(line).map_err(|e| match e {
                    Error::Syntax { col, expected, .. } => Error::Syntax {
                        line: n + 1,
                        col,
                        expected,
                    },
                    e => e,
                })?;
                out.extend(m.into_iter().map(TraceLine::Move));
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LedgerEvent {
    pub kind: SplitKind,
    /// Index of the SPLIT line in the trace.
    pub step: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TrefoilLedger {
    pub events: Vec<LedgerEvent>,
    i: u8,
}

impl TrefoilLedger {
    pub fn push(&mut self, kind: SplitKind, step: usize) {
        self.i = match kind {
            SplitKind::Right => (self.i + 1) % 3,
            SplitKind::Left => (self.i + 2) % 3,
            SplitKind::Loop => self.i,
        };
        self.events.push(LedgerEvent { kind, step });
    }

    pub fn i(&self) -> u8 {
        self.i
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TrefoilClass {
    Trivial,
    RightTrefoil,
    LeftTrefoil,
}

impl TrefoilClass {
    pub fn from_i(i: u8) -> Self {
        match i % 3 {
            0 => TrefoilClass::Trivial,
            1 => TrefoilClass::RightTrefoil,
            _ => TrefoilClass::LeftTrefoil,
        }
    }
}

impl fmt::Display for TrefoilClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TrefoilClass::Trivial => "Trivial",
            TrefoilClass::RightTrefoil => "RightTrefoil",
            TrefoilClass::LeftTrefoil => "LeftTrefoil",
        })
    }
}

#[derive(Clone, Debug)]
pub struct ClassificationResult {
    pub class: TrefoilClass,
    pub i: u8,
    pub trace: Vec<TraceLine>,
    pub ledger: TrefoilLedger,
    /// The loops-only diagram the trace ends in.
    pub terminal: (LinkDiagram, GColoring),
    /// Clasp count before and after each elimination round.
    pub rounds: Vec<(usize, usize)>,
}

fn tail(d: &LinkDiagram, arc: ArcId) -> Option<(usize, usize)> {
    d.ends()[arc as usize - 1].map(|e| e[0])
}

/// Removes the component through `arc` together with everything it crosses.
/// Returns the new state, the removed crossings and the new arc labels.
#[allow(clippy::type_complexity)]
fn remove_component(
    d: &LinkDiagram,
    g: &FiniteGroup,
    psi: &GColoring,
    arc: ArcId,
) -> Result<(LinkDiagram, GColoring, Vec<usize>, Vec<u32>)> {
    if arc == 0 || arc > d.num_arcs() {
        return Err(Error::InvalidMove(format!("arc {arc} does not exist")));
    }
    let mut w = Work::from_diagram(d, &psi.values, g);
    let xs = match tail(d, arc) {
        None => {
            w.kill_edge(arc as usize - 1);
            vec![]
        }
        Some((x, _)) => {
            let comp = d.projection_components().into_iter().find(|c| c.contains(&x)).unwrap();
            w.remove_crossings(&comp);
            comp
        }
    };
    let (d2, colors, label) = w.finish_tracked()?;
    Ok((d2, GColoring::new(colors), xs, label))
}

/// Handedness of a split component, `None` unless it is a 3-crossing
/// diagram with all crossings of one sign.
fn split_kind(d: &LinkDiagram, psi: &GColoring, xs: &[usize]) -> Option<SplitKind> {
    if xs.len() != 3 {
        return None;
    }
    let sign = d.crossings()[xs[0]].sign;
    if xs.iter().any(|&x| d.crossings()[x].sign != sign) {
        return None;
    }
    let colors: Vec<Elem> = xs
        .iter()
        .flat_map(|&x| d.crossings()[x].slots)
        .map(|a| psi.get(a))
        .collect();
    Some(if colors.windows(2).all(|w| w[0] == w[1]) {
        SplitKind::Loop
    } else if sign > 0 {
        SplitKind::Right
    } else {
        SplitKind::Left
    })
}

/// Replays a classification trace, returning the final state and ledger.
pub fn replay_trace(
    d: &LinkDiagram,
    psi: &GColoring,
    trace: &[TraceLine],
) -> Result<(LinkDiagram, GColoring, TrefoilLedger)> {
    let (g, _) = builtin_sigma3();
    let mut cur = (d.clone(), psi.clone());
    let mut ledger = TrefoilLedger::default();
    for (k, line) in trace.iter().enumerate() {
        match line {
            TraceLine::Move(m) => cur = apply_move(&cur.0, &g, &cur.1, m)?,
            TraceLine::Split { kind, arc } => {
                let (d2, psi2, _, _) = remove_component(&cur.0, &g, &cur.1, *arc)?;
                ledger.push(*kind, k);
                cur = (d2, psi2);
            }
            TraceLine::Elim { .. } => {}
        }
    }
    Ok((cur.0, cur.1, ledger))
}

/// Corner of `x` whose face is a bigon with crossing `y`.
fn corner_toward(r: &Regions, x: usize, y: usize) -> Option<usize> {
    (0..4).find(|&j| {
        let f = &r.faces()[r.face_at((x, j))];
        x != y && f.len() == 2 && f.iter().any(|&(z, _)| z == y)
    })
}

fn side_facing(r: &Regions, arc: ArcId, f: usize) -> Option<Side> {
    [Side::L, Side::R].into_iter().find(|&s| r.face(arc, s) == Some(f))
}

/// Whether the bigon at corner `j` of `x` has one strand over at both ends.
fn is_flat_bigon(d: &LinkDiagram, r: &Regions, x: usize, j: usize) -> bool {
    let face = &r.faces()[r.face_at((x, j))];
    let &(y, k) = face.iter().find(|&&(z, _)| z != x).unwrap();
    let e = d.crossings()[x].slots[j];
    let ky = if d.crossings()[y].slots[k] == e { k } else { (k + 1) % 4 };
    Crossing::is_over(j) == Crossing::is_over(ky)
}

/// An unclasped curve: segments at even positions, clasp middles at odd ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClaspLoop {
    pub arcs: Vec<ArcId>,
    pub colors: Vec<Elem>,
    /// Face bounded by exactly this loop's arcs, if the loop is innermost.
    pub interior: Option<usize>,
}

impl ClaspLoop {
    pub fn degree(&self) -> usize {
        self.arcs.len() / 2
    }

    pub fn is_innermost(&self) -> bool {
        self.interior.is_some()
    }

    pub fn segments(&self) -> impl Iterator<Item = ArcId> + '_ {
        self.arcs.iter().step_by(2).copied()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Clasp {
    pub crossings: (usize, usize),
    /// Loops holding the two ends.
    pub loops: (usize, usize),
    pub sign: i8,
    pub colors: (Elem, Elem),
}

/// Loops-and-clasps form of a diagram whose crossings come in clasps.
#[derive(Clone, Debug)]
pub struct ClaspGraph {
    pub loops: Vec<ClaspLoop>,
    pub clasps: Vec<Clasp>,
    pub free_loops: Vec<ArcId>,
    /// Crossings not belonging to any clasp.
    pub unpaired: Vec<usize>,
}

impl ClaspGraph {
    pub fn of(d: &LinkDiagram, psi: &GColoring) -> Self {
        let r = Regions::new(d);
        let n = d.num_crossings();
        // alternating bigons between distinct crossings
        let mut adj: Vec<Vec<(usize, usize)>> = vec![vec![]; n];
        for (x, out) in adj.iter_mut().enumerate() {
            for j in 0..4 {
                let f = &r.faces()[r.face_at((x, j))];
                if f.len() == 2 && f[0].0 != f[1].0 && !is_flat_bigon(d, &r, x, j) {
                    let y = if f[0].0 == x { f[1].0 } else { f[0].0 };
                    out.push((y, j));
                }
            }
        }
        // leaf-first greedy matching, exact on the paths twist regions form
        let mut partner: Vec<Option<(usize, usize)>> = vec![None; n];
        loop {
            let free = |z: usize, p: &[Option<(usize, usize)>]| adj[z].iter().filter(|&&(y, _)| p[y].is_none()).count();
            let pick = (0..n)
                .filter(|&x| partner[x].is_none() && free(x, &partner) > 0)
                .min_by_key(|&x| (free(x, &partner), x));
            let Some(x) = pick else { break };
            let &(y, j) = adj[x]
                .iter()
                .filter(|&&(y, _)| partner[y].is_none())
                .min_by_key(|&&(y, _)| (free(y, &partner), y))
                .unwrap();
            let k = corner_toward(&r, y, x).unwrap();
            partner[x] = Some((y, j));
            partner[y] = Some((x, k));
        }
        let unpaired: Vec<usize> = (0..n).filter(|&x| partner[x].is_none()).collect();
        let mut loops = Vec::new();
        let mut loop_of = vec![usize::MAX; d.num_arcs() as usize];
        if unpaired.is_empty() {
            let ends = d.ends();
            let mut middle = vec![false; d.num_arcs() as usize];
            for x in 0..n {
                let (_, j) = partner[x].unwrap();
                for s in [j, (j + 1) % 4] {
                    middle[d.crossings()[x].slots[s] as usize - 1] = true;
                }
            }
            for a in d.arcs() {
                if middle[a as usize - 1] || loop_of[a as usize - 1] != usize::MAX {
                    continue;
                }
                let Some([start, _]) = ends[a as usize - 1] else {
                    continue;
                };
                let id = loops.len();
                let mut arcs = vec![];
                let mut from = start;
                loop {
                    let e = d.crossings()[from.0].slots[from.1];
                    arcs.push(e);
                    loop_of[e as usize - 1] = id;
                    let (x, s) = d.opposite(&ends, from);
                    let (y, j) = partner[x].unwrap();
                    let ms = if s == (j + 2) % 4 { (j + 1) % 4 } else { j };
                    let m = d.crossings()[x].slots[ms];
                    arcs.push(m);
                    loop_of[m as usize - 1] = id;
                    let (y2, t) = d.opposite(&ends, (x, ms));
                    debug_assert_eq!(y2, y);
                    let (_, k) = partner[y].unwrap();
                    let exit = if t == (k + 1) % 4 { (k + 2) % 4 } else { (k + 3) % 4 };
                    from = (y, exit);
                    if from == start {
                        break;
                    }
                }
                let colors = arcs.iter().map(|&a| psi.get(a)).collect();
                let interior = interior_face(d, &r, &arcs);
                loops.push(ClaspLoop { arcs, colors, interior });
            }
        }
        let mut clasps = Vec::new();
        if unpaired.is_empty() {
            for (x, p) in partner.iter().enumerate() {
                let (y, j) = p.unwrap();
                if y < x {
                    continue;
                }
                let c = d.crossings()[x];
                let (m1, m2) = (c.slots[j], c.slots[(j + 1) % 4]);
                clasps.push(Clasp {
                    crossings: (x, y),
                    loops: (loop_of[m1 as usize - 1], loop_of[m2 as usize - 1]),
                    sign: c.sign,
                    colors: (psi.get(c.over_in()), psi.get(c.under_in())),
                });
            }
        }
        ClaspGraph {
            loops,
            clasps,
            free_loops: d.loops().to_vec(),
            unpaired,
        }
    }

    /// Lowest-id innermost loop.
    pub fn first_innermost(&self) -> Option<usize> {
        self.loops.iter().position(|l| l.is_innermost())
    }

    pub fn loop_of(&self, arc: ArcId) -> Option<usize> {
        self.loops.iter().position(|l| l.arcs.contains(&arc))
    }

    pub fn clasp_count(&self) -> usize {
        self.clasps.len()
    }
}

fn interior_face(d: &LinkDiagram, r: &Regions, arcs: &[ArcId]) -> Option<usize> {
    let mut want: Vec<ArcId> = arcs.to_vec();
    want.sort_unstable();
    [Side::L, Side::R]
        .into_iter()
        .filter_map(|s| r.face(arcs[0], s))
        .find(|&f| {
            let mut got: Vec<ArcId> = r.faces()[f].iter().map(|&dt| Regions::site_of(d, dt).0).collect();
            got.sort_unstable();
            got == want
        })
}

const GONE: usize = usize::MAX;

/// Shifts a crossing index past the removal of `removed`.
fn shift(x: usize, removed: &[usize]) -> usize {
    if x == GONE || removed.contains(&x) {
        GONE
    } else {
        x - removed.iter().filter(|&&r| r < x).count()
    }
}

/// Classification engine over a tricolored diagram.
#[derive(Clone)]
pub struct Reducer {
    g: FiniteGroup,
    d: LinkDiagram,
    psi: GColoring,
    trace: Vec<TraceLine>,
    ledger: TrefoilLedger,
    steps: usize,
    limit: usize,
    rounds: Vec<(usize, usize)>,
    /// Arcs and crossings kept up to date across moves.
    watch: Vec<ArcId>,
    watch_x: Vec<usize>,
}

impl Reducer {
    pub fn new(d: &LinkDiagram, psi: &GColoring) -> Result<Self> {
        Self::with_limit(d, psi, DEFAULT_STEP_LIMIT)
    }

    pub fn with_limit(d: &LinkDiagram, psi: &GColoring, limit: usize) -> Result<Self> {
        let (g, s) = builtin_sigma3();
        d.validate()?;
        validate_coloring(d, &g, Some(&s), psi)?;
        Ok(Reducer {
            g,
            d: d.clone(),
            psi: psi.clone(),
            trace: vec![],
            ledger: TrefoilLedger::default(),
            steps: 0,
            limit,
            rounds: vec![],
            watch: vec![],
            watch_x: vec![],
        })
    }

    pub fn diagram(&self) -> &LinkDiagram {
        &self.d
    }

    pub fn coloring(&self) -> &GColoring {
        &self.psi
    }

    pub fn trace(&self) -> &[TraceLine] {
        &self.trace
    }

    pub fn ledger(&self) -> &TrefoilLedger {
        &self.ledger
    }

    pub fn rounds(&self) -> &[(usize, usize)] {
        &self.rounds
    }

    pub fn graph(&self) -> ClaspGraph {
        ClaspGraph::of(&self.d, &self.psi)
    }

    pub fn clasp_count(&self) -> usize {
        self.d.num_crossings().div_ceil(2)
    }

    fn regions(&self) -> Regions {
        Regions::new(&self.d)
    }

    fn sign(&self, x: usize) -> i8 {
        self.d.crossings()[x].sign
    }

    fn tick(&mut self) -> Result<()> {
        if self.steps >= self.limit {
            return Err(Error::ResourceBound(format!(
                "more than {} reduction steps",
                self.limit
            )));
        }
        self.steps += 1;
        Ok(())
    }

    fn relabel(&mut self, label: &[u32], removed: &[usize]) {
        for a in &mut self.watch {
            if *a != 0 {
                *a = label[*a as usize - 1];
            }
        }
        for x in &mut self.watch_x {
            *x = shift(*x, removed);
        }
    }

    fn commit(&mut self, m: MoveEvent, a: Applied) -> Result<Vec<ArcId>> {
        self.tick()?;
        let removed = match m {
            MoveEvent::R1Remove { crossing } => vec![crossing],
            MoveEvent::R2Remove { arc, side } => {
                let (x, y) = bigon(&self.d, &self.regions(), arc, side)?;
                vec![x, y]
            }
            _ => vec![],
        };
        self.relabel(&a.label, &removed);
        let created = a.created.iter().map(|&e| a.label[e]).collect();
        self.d = a.d;
        self.psi = a.psi;
        self.trace.push(TraceLine::Move(m));
        Ok(created)
    }

    fn apply(&mut self, m: MoveEvent) -> Result<Vec<ArcId>> {
        let a = apply_tracked(&self.d, &self.g, &self.psi, &m)?;
        self.commit(m, a)
    }

    /// Removes the split component through crossing `x`.
    fn split_off(&mut self, x: usize) -> Result<SplitKind> {
        let arc = self.d.crossings()[x].slots[0];
        let (d2, psi2, xs, label) = remove_component(&self.d, &self.g, &self.psi, arc)?;
        let kind = split_kind(&self.d, &self.psi, &xs)
            .ok_or_else(|| Error::NoProgress(format!("component at crossing {x} is not a trefoil")))?;
        self.tick()?;
        self.relabel(&label, &xs);
        self.d = d2;
        self.psi = psi2;
        self.ledger.push(kind, self.trace.len());
        self.trace.push(TraceLine::Split { kind, arc });
        Ok(kind)
    }

    /// Pushes the two arcs at the corner `c` of `x` across each other. Returns
    /// the new crossing next to `x`, which has the sign of `x`, and the other.
    fn insert_outside(&mut self, x: usize, c: usize) -> Result<(usize, usize)> {
        let r = self.regions();
        let f = r.face_at((x, c));
        let cx = self.d.crossings()[x];
        let (a1, a2) = (cx.slots[c], cx.slots[(c + 1) % 4]);
        let fail = || Error::NoProgress(format!("cannot widen crossing {x} at corner {c}"));
        if a1 == a2 {
            return Err(fail());
        }
        let s1 = side_facing(&r, a1, f).ok_or_else(fail)?;
        let s2 = side_facing(&r, a2, f).ok_or_else(fail)?;
        let n = self.d.num_crossings();
        for over in [false, true] {
            let m = MoveEvent::R2Add {
                arc1: a1,
                side1: s1,
                arc2: a2,
                side2: s2,
                over,
            };
            let a = apply_tracked(&self.d, &self.g, &self.psi, &m)?;
            let r2 = Regions::new(&a.d);
            let Some(near) = [n, n + 1].into_iter().find(|&z| corner_toward(&r2, z, x).is_some()) else {
                continue;
            };
            let far = 2 * n + 1 - near;
            let eps = self.sign(x);
            if a.d.crossings()[near].sign == eps && a.d.crossings()[far].sign == -eps {
                self.commit(m, a)?;
                return Ok((near, far));
            }
        }
        Err(fail())
    }

    /// Splits off the 3-crossing twist block running from `b` to `t`, given
    /// the corners of `b` and `t` facing away from the block.
    fn split_block(&mut self, b: usize, cb: usize, t: usize, ct: usize) -> Result<SplitKind> {
        let r = self.regions();
        let (xb, xt) = (self.d.crossings()[b], self.d.crossings()[t]);
        let (lb, rb) = (xb.slots[cb], xb.slots[(cb + 1) % 4]);
        let (rt, lt) = (xt.slots[ct], xt.slots[(ct + 1) % 4]);
        let lf = r.face_at((t, (ct + 1) % 4));
        let fail = || Error::NoProgress(format!("cannot split the block between crossings {b} and {t}"));
        let (s1, s2) = (
            side_facing(&r, lb, lf).ok_or_else(fail)?,
            side_facing(&r, lt, lf).ok_or_else(fail)?,
        );
        let base = self.watch.len();
        self.watch.extend([rb, rt]);
        self.watch_x.push(t);
        let res = self.apply(MoveEvent::Saddle {
            arc1: lb,
            side1: s1,
            arc2: lt,
            side2: s2,
        });
        let (rb, rt) = (self.watch[base], self.watch[base + 1]);
        self.watch.truncate(base);
        let t = self.watch_x.pop().unwrap();
        res?;
        let r = self.regions();
        for (u, v) in [
            (Side::L, Side::L),
            (Side::R, Side::R),
            (Side::L, Side::R),
            (Side::R, Side::L),
        ] {
            if r.face(rb, u).is_none() || r.face(rb, u) != r.face(rt, v) {
                continue;
            }
            let m = MoveEvent::Saddle {
                arc1: rb,
                side1: u,
                arc2: rt,
                side2: v,
            };
            let Ok(a) = apply_tracked(&self.d, &self.g, &self.psi, &m) else {
                continue;
            };
            let comp =
                a.d.projection_components()
                    .into_iter()
                    .find(|c| c.contains(&t))
                    .unwrap();
            if split_kind(&a.d, &a.psi, &comp).is_some() {
                self.commit(m, a)?;
                return self.split_off(t);
            }
        }
        Err(fail())
    }

    /// Replaces single crossing `x` by two of the opposite sign.
    fn twist_single(&mut self, x: usize) -> Result<()> {
        let cb = if self.sign(x) > 0 { 3 } else { 0 };
        self.twist_single_at(x, cb)
    }

    /// Same, growing the twist out of corner `cb` of `x`.
    fn twist_single_at(&mut self, x: usize, cb: usize) -> Result<()> {
        let (n1, f1) = self.insert_outside(x, cb)?;
        let c1 = corner_toward(&self.regions(), n1, f1).unwrap();
        let (n2, f2) = self.insert_outside(n1, c1)?;
        let c2 = corner_toward(&self.regions(), n2, f2).unwrap();
        self.split_block(n2, c2, x, (cb + 2) % 4)?;
        Ok(())
    }

    /// Replaces clasp `(x, y)` by a single crossing of the opposite sign.
    /// Returns it with its corner facing where the clasp was.
    fn twist_clasp(&mut self, x: usize, y: usize) -> Result<(usize, usize)> {
        let r = self.regions();
        let jx = corner_toward(&r, x, y).ok_or_else(|| Error::NoProgress(format!("{x} and {y} form no clasp")))?;
        self.watch_x.push(y);
        let (near, far) = self.insert_outside(x, (jx + 2) % 4)?;
        let y = self.watch_x.pop().unwrap();
        let r = self.regions();
        let cn = corner_toward(&r, near, far).unwrap();
        let jy = corner_toward(&r, y, x).unwrap();
        let cf = corner_toward(&r, far, near).unwrap();
        let bottom = self.d.crossings()[far].slots[(cf + 2) % 4];
        let base = self.watch.len();
        self.watch.push(bottom);
        self.watch_x.push(far);
        let res = self.split_block(near, cn, y, (jy + 2) % 4);
        let far = self.watch_x.pop().unwrap();
        let bottom = self.watch[base];
        self.watch.truncate(base);
        res?;
        let c = self.d.crossings()[far];
        let s = (0..4).find(|&s| c.slots[s] == bottom).unwrap();
        Ok((far, (s + 2) % 4))
    }

    /// Adds three crossings of the sign of `z` next to it at corner `top`.
    fn twist_up(&mut self, z: usize, top: usize) -> Result<()> {
        let (a1, b1) = self.insert_outside(z, top)?;
        let c = corner_toward(&self.regions(), a1, b1).unwrap();
        self.watch_x.push(b1);
        let (a2, b2) = self.insert_outside(a1, c)?;
        let c = corner_toward(&self.regions(), a2, b2).unwrap();
        self.watch_x.push(b2);
        let (a3, b3) = self.insert_outside(a2, c)?;
        let b2 = self.watch_x.pop().unwrap();
        let b1 = self.watch_x.pop().unwrap();
        let r = self.regions();
        let cb = corner_toward(&r, b3, a3).unwrap();
        let ct = (corner_toward(&r, b1, b2).unwrap() + 2) % 4;
        self.split_block(b3, cb, b1, ct)?;
        Ok(())
    }

    /// Re-clasps clasp `(x, y)` across the other diagonal, which changes
    /// the smoothing of its crossings and so splits or merges loops.
    pub fn rotate_clasp(&mut self, x: usize, y: usize) -> Result<()> {
        let (z, top) = self.twist_clasp(x, y)?;
        self.twist_single_at(z, (top + 1) % 4)
    }

    fn is_mono(&self, x: usize) -> bool {
        let c = self.d.crossings()[x];
        self.psi.get(c.over_in()) == self.psi.get(c.under_in())
    }

    /// Removes a crossing between equally colored strands.
    fn remove_mono(&mut self, x: usize) -> Result<()> {
        if monogon_slot(&self.d, x).is_none() {
            let c = self.d.crossings()[x];
            let corner = if c.sign > 0 { 0 } else { 3 };
            let (e1, e2) = (c.slots[corner], c.slots[(corner + 1) % 4]);
            let s1 = if c.is_outgoing(corner) { Side::L } else { Side::R };
            let s2 = if c.is_outgoing((corner + 1) % 4) {
                Side::R
            } else {
                Side::L
            };
            self.apply(MoveEvent::Saddle {
                arc1: e1,
                side1: s1,
                arc2: e2,
                side2: s2,
            })?;
        }
        self.apply(MoveEvent::R1Remove { crossing: x })?;
        Ok(())
    }

    fn remove_all_mono(&mut self) -> Result<()> {
        while let Some(x) = (0..self.d.num_crossings()).rev().find(|&x| self.is_mono(x)) {
            self.remove_mono(x)?;
        }
        Ok(())
    }

    /// Converts every crossing into a clasp, one trefoil split per crossing.
    pub fn clasp_normalize(&mut self) -> Result<()> {
        for x in (0..self.d.num_crossings()).rev() {
            self.twist_single(x)?;
        }
        Ok(())
    }

    fn innermost(&self, g: &ClaspGraph, id: usize) -> Result<usize> {
        let l = g
            .loops
            .get(id)
            .ok_or_else(|| Error::InvalidParameter(format!("no loop {id}")))?;
        l.interior.ok_or(Error::NotInnermost(id))
    }

    /// Cuts innermost loop `id` by saddles across its interior until every
    /// piece has degree at most 3.
    pub fn reduce_innermost_degree(&mut self, id: usize) -> Result<()> {
        let g = self.graph();
        self.innermost(&g, id)?;
        let base = self.watch.len();
        self.watch.extend(g.loops[id].arcs.iter().skip(1).step_by(2));
        let res = self.reduce_pieces(base);
        self.watch.truncate(base);
        res
    }

    /// Saddles pieces holding the middles watched from `base` on.
    fn reduce_pieces(&mut self, base: usize) -> Result<()> {
        loop {
            let g = self.graph();
            let Some(l) = self.watch[base..]
                .iter()
                .filter_map(|&m| g.loop_of(m))
                .find(|&k| g.loops[k].degree() > 3)
            else {
                return Ok(());
            };
            let lp = &g.loops[l];
            let f = lp.interior.ok_or(Error::NotInnermost(l))?;
            let segs: Vec<(ArcId, Elem)> = lp.segments().map(|a| (a, self.psi.get(a))).collect();
            let k = segs.len();
            let pick = (0..k)
                .flat_map(|i| (i + 2..k).map(move |j| (i, j)))
                .filter(|&(i, j)| j - i <= k - 2 && segs[i].1 == segs[j].1)
                .min_by_key(|&(i, j)| ((j - i).min(k - j + i)).abs_diff(3));
            let Some((i, j)) = pick else {
                return Err(Error::NoProgress(format!(
                    "loop {l} of degree {k} has no equal segments to join"
                )));
            };
            let r = self.regions();
            let (a1, a2) = (segs[i].0, segs[j].0);
            let s1 = side_facing(&r, a1, f).unwrap();
            let s2 = side_facing(&r, a2, f).unwrap();
            self.apply(MoveEvent::Saddle {
                arc1: a1,
                side1: s1,
                arc2: a2,
                side2: s2,
            })?;
        }
    }

    fn clasps_of(&self, g: &ClaspGraph, id: usize) -> Vec<(usize, usize)> {
        let ends = self.d.ends();
        g.loops[id]
            .arcs
            .iter()
            .skip(1)
            .step_by(2)
            .map(|&m| {
                let [t, h] = ends[m as usize - 1].unwrap();
                (t.0, h.0)
            })
            .collect()
    }

    /// Eliminates innermost loop `id` of degree at most 3.
    pub fn eliminate_innermost(&mut self, id: usize) -> Result<()> {
        let g = self.graph();
        self.innermost(&g, id)?;
        let degree = g.loops[id].degree();
        let before = self.clasp_count();
        match degree {
            0 => {}
            1 => {
                let (x, y) = self.clasps_of(&g, id)[0];
                if !self.is_mono(x) {
                    return Err(Error::NoProgress(format!(
                        "degree-1 loop {id} has a trichromatic clasp"
                    )));
                }
                self.watch_x.push(y);
                let r = self.remove_mono(x);
                let y = self.watch_x.pop().unwrap();
                r?;
                self.remove_mono(y)?;
            }
            2 => self.eliminate_2(&g, id)?,
            3 => self.eliminate_3(&g, id)?,
            _ => return Err(Error::BadDegree { loop_id: id, degree }),
        }
        let after = self.clasp_count();
        self.rounds.push((before, after));
        if degree > 0 && after >= before {
            return Err(Error::NoProgress(format!(
                "clasp count {before} -> {after} eliminating loop {id}"
            )));
        }
        self.trace.push(TraceLine::Elim { loop_id: id, degree });
        Ok(())
    }

    /// Turns both clasps into single crossings; they then bound the loop's
    /// face as one clasp, or as a bigon that unfolds.
    fn eliminate_2(&mut self, g: &ClaspGraph, id: usize) -> Result<()> {
        let cl = self.clasps_of(g, id);
        self.watch_x.extend([cl[1].0, cl[1].1]);
        let z1 = self.twist_clasp(cl[0].0, cl[0].1);
        let y = self.watch_x.pop().unwrap();
        let x = self.watch_x.pop().unwrap();
        let (z1, _) = z1?;
        self.watch_x.push(z1);
        let z2 = self.twist_clasp(x, y);
        let z1 = self.watch_x.pop().unwrap();
        let (z2, _) = z2?;
        let r = self.regions();
        let j = corner_toward(&r, z1, z2)
            .ok_or_else(|| Error::NoProgress(format!("loop {id} did not close into a bigon")))?;
        if is_flat_bigon(&self.d, &r, z1, j) {
            let (arc, side) = Regions::site_of(&self.d, (z1, j));
            self.apply(MoveEvent::R2Remove { arc, side })?;
        }
        Ok(())
    }

    /// Turns one clasp into four crossings, splitting two trefoils, then
    /// cuts the loop into two loops of degree 2 and eliminates both.
    fn eliminate_3(&mut self, g: &ClaspGraph, id: usize) -> Result<()> {
        let cl = self.clasps_of(g, id);
        // twist a clasp met once, leaving a middle of another to find the loop by
        let k = (0..3)
            .find(|&k| cl.iter().filter(|&&c| c == cl[k]).count() == 1)
            .unwrap_or(0);
        let base = self.watch.len();
        self.watch.push(g.loops[id].arcs[2 * ((k + 1) % 3) + 1]);
        let res = self
            .twist_clasp(cl[k].0, cl[k].1)
            .and_then(|(z, top)| self.twist_up(z, top));
        let res = res.and_then(|_| {
            let g = self.graph();
            let l = g
                .loop_of(self.watch[base])
                .ok_or_else(|| Error::NoProgress(format!("lost loop {id}")))?;
            self.watch.truncate(base);
            self.watch.extend(g.loops[l].arcs.iter().skip(1).step_by(2));
            self.reduce_pieces(base)?;
            loop {
                let g = self.graph();
                let found = self.watch[base..]
                    .iter()
                    .filter_map(|&m| g.loop_of(m))
                    .find(|&l| g.loops[l].degree() == 2);
                let Some(l) = found else { return Ok(()) };
                self.innermost(&g, l)?;
                self.eliminate_2(&g, l)?;
            }
        });
        self.watch.truncate(base);
        res
    }

    /// Runs the whole reduction until no crossings remain.
    pub fn run(&mut self) -> Result<()> {
        self.clasp_normalize()?;
        loop {
            self.remove_all_mono()?;
            if self.d.num_crossings() == 0 {
                return Ok(());
            }
            let g = self.graph();
            if let Some(&x) = g.unpaired.last() {
                self.twist_single(x)?;
                continue;
            }
            let Some(id) = g.first_innermost() else {
                let c = g.clasps.iter().find(|c| c.loops.0 == c.loops.1);
                let c = c.ok_or_else(|| Error::NoProgress("no innermost loop".into()))?;
                self.rotate_clasp(c.crossings.0, c.crossings.1)?;
                continue;
            };
            if g.loops[id].degree() > 3 {
                self.reduce_innermost_degree(id)?;
            } else {
                self.eliminate_innermost(id)?;
            }
        }
    }

    pub fn finish(self) -> ClassificationResult {
        let i = self.ledger.i();
        ClassificationResult {
            class: TrefoilClass::from_i(i),
            i,
            trace: self.trace,
            ledger: self.ledger,
            terminal: (self.d, self.psi),
            rounds: self.rounds,
        }
    }
}

pub fn classify(d: &LinkDiagram, psi: &GColoring) -> Result<ClassificationResult> {
    classify_with_limit(d, psi, DEFAULT_STEP_LIMIT)
}

pub fn classify_with_limit(d: &LinkDiagram, psi: &GColoring, limit: usize) -> Result<ClassificationResult> {
    let mut r = Reducer::with_limit(d, psi, limit)?;
    r.run()?;
    Ok(r.finish())
}

/// Clasp normal form of a tricolored diagram with the trefoils split off.
pub fn clasp_normalize(d: &LinkDiagram, psi: &GColoring) -> Result<(Reducer, ClaspGraph)> {
    let mut r = Reducer::new(d, psi)?;
    r.clasp_normalize()?;
    let g = r.graph();
    Ok((r, g))
}
