//! Colored Reidemeister moves, saddle reconnections and move logs.
//!
//! Sites name an arc and a side. The left side of an arc is the face on the
//! left when walking along its orientation. Faces are those of the projection
//! component; separate projection components can always be brought next to
//! each other, so two arcs in different components always share a region.

use std::fmt;
use std::str::FromStr;

use crate::coloring::GColoring;
use crate::diagram::{ArcId, Dart, LinkDiagram};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::planar::Work;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    L,
    R,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::L => Side::R,
            Side::R => Side::L,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MoveEvent {
    /// Kink on `arc`; `over` makes the first passage the over-strand.
    R1Add {
        arc: ArcId,
        side: Side,
        over: bool,
    },
    R1Remove {
        crossing: usize,
    },
    /// Finger move of `arc1` across `arc2`; `over` puts `arc1` on top.
    R2Add {
        arc1: ArcId,
        side1: Side,
        arc2: ArcId,
        side2: Side,
        over: bool,
    },
    /// Removes the bigon on the given side of `arc`.
    R2Remove {
        arc: ArcId,
        side: Side,
    },
    /// Moves a strand across the triangle on the given side of `arc`.
    R3 {
        arc: ArcId,
        side: Side,
    },
    Saddle {
        arc1: ArcId,
        side1: Side,
        arc2: ArcId,
        side2: Side,
    },
}

impl MoveEvent {
    pub fn kind(&self) -> &'static str {
        match self {
            MoveEvent::R1Add { .. } => "R1_add",
            MoveEvent::R1Remove { .. } => "R1_remove",
            MoveEvent::R2Add { .. } => "R2_add",
            MoveEvent::R2Remove { .. } => "R2_remove",
            MoveEvent::R3 { .. } => "R3",
            MoveEvent::Saddle { .. } => "Saddle",
        }
    }

    pub fn is_reidemeister(&self) -> bool {
        !matches!(self, MoveEvent::Saddle { .. })
    }
}

fn ou(over: bool) -> &'static str {
    if over {
        "over"
    } else {
        "under"
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::L => "L",
            Side::R => "R",
        })
    }
}

impl fmt::Display for MoveEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            MoveEvent::R1Add { arc, side, over } => write!(f, "R1_add {arc} {side} {}", ou(over)),
            MoveEvent::R1Remove { crossing } => write!(f, "R1_remove {crossing}"),
            MoveEvent::R2Add {
                arc1,
                side1,
                arc2,
                side2,
                over,
            } => {
                write!(f, "R2_add {arc1} {side1} {arc2} {side2} {}", ou(over))
            }
            MoveEvent::R2Remove { arc, side } => write!(f, "R2_remove {arc} {side}"),
            MoveEvent::R3 { arc, side } => write!(f, "R3 {arc} {side}"),
            MoveEvent::Saddle {
                arc1,
                side1,
                arc2,
                side2,
            } => {
                write!(f, "Saddle {arc1} {side1} {arc2} {side2}")
            }
        }
    }
}

impl FromStr for MoveEvent {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let t: Vec<&str> = line.split_whitespace().collect();
        let bad = || Error::InvalidInput(format!("malformed move `{line}`"));
        let arc = |i: usize| -> Result<ArcId> {
            t.get(i)
                .and_then(|s| s.parse().ok())
                .filter(|&a: &ArcId| a >= 1)
                .ok_or_else(bad)
        };
        let side = |i: usize| -> Result<Side> {
            match t.get(i).copied() {
                Some("L") => Ok(Side::L),
                Some("R") => Ok(Side::R),
                _ => Err(bad()),
            }
        };
        let over = |i: usize| -> Result<bool> {
            match t.get(i).copied() {
                Some("over") => Ok(true),
                Some("under") => Ok(false),
                _ => Err(bad()),
            }
        };
        let (m, n) = match t.first().copied() {
            Some("R1_add") => (
                MoveEvent::R1Add {
                    arc: arc(1)?,
                    side: side(2)?,
                    over: over(3)?,
                },
                4,
            ),
            Some("R1_remove") => (
                MoveEvent::R1Remove {
                    crossing: t.get(1).and_then(|s| s.parse().ok()).ok_or_else(bad)?,
                },
                2,
            ),
            Some("R2_add") => (
                MoveEvent::R2Add {
                    arc1: arc(1)?,
                    side1: side(2)?,
                    arc2: arc(3)?,
                    side2: side(4)?,
                    over: over(5)?,
                },
                6,
            ),
            Some("R2_remove") => (
                MoveEvent::R2Remove {
                    arc: arc(1)?,
                    side: side(2)?,
                },
                3,
            ),
            Some("R3") => (
                MoveEvent::R3 {
                    arc: arc(1)?,
                    side: side(2)?,
                },
                3,
            ),
            Some("Saddle") => (
                MoveEvent::Saddle {
                    arc1: arc(1)?,
                    side1: side(2)?,
                    arc2: arc(3)?,
                    side2: side(4)?,
                },
                5,
            ),
            _ => return Err(bad()),
        };
        if t.len() != n {
            return Err(bad());
        }
        Ok(m)
    }
}

/// Parses a move log; blank lines and `#` comments are skipped.
pub fn parse_log(text: &str) -> Result<Vec<MoveEvent>> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(str::parse)
        .collect()
}

pub fn serialize_log(moves: &[MoveEvent]) -> String {
    moves.iter().map(|m| format!("{m}\n")).collect()
}

/// Face incidence of a diagram.
pub struct Regions {
    face_of: Vec<[usize; 4]>,
    faces: Vec<Vec<Dart>>,
    proj: Vec<usize>,
    ends: Vec<Option<[Dart; 2]>>,
}

impl Regions {
    pub fn new(d: &LinkDiagram) -> Self {
        let faces = d.faces();
        let mut face_of = vec![[0; 4]; d.num_crossings()];
        for (f, face) in faces.iter().enumerate() {
            for &(x, s) in face {
                face_of[x][s] = f;
            }
        }
        let mut proj = vec![0; d.num_crossings()];
        for (k, comp) in d.projection_components().iter().enumerate() {
            for &x in comp {
                proj[x] = k;
            }
        }
        Regions {
            face_of,
            faces,
            proj,
            ends: d.ends(),
        }
    }

    /// The dart whose face lies on `side` of `arc`; `None` for loops.
    pub fn dart(&self, arc: ArcId, side: Side) -> Option<Dart> {
        self.ends[arc as usize - 1].map(|[t, h]| match side {
            Side::L => t,
            Side::R => h,
        })
    }

    pub fn face(&self, arc: ArcId, side: Side) -> Option<usize> {
        self.dart(arc, side).map(|(x, s)| self.face_of[x][s])
    }

    pub fn faces(&self) -> &[Vec<Dart>] {
        &self.faces
    }

    /// Face at the corner between slots `s` and `s + 1` of crossing `x`.
    pub fn face_at(&self, (x, s): Dart) -> usize {
        self.face_of[x][s]
    }

    pub fn share_region(&self, a1: ArcId, s1: Side, a2: ArcId, s2: Side) -> bool {
        match (self.dart(a1, s1), self.dart(a2, s2)) {
            (Some((x1, t1)), Some((x2, t2))) => {
                self.proj[x1] != self.proj[x2] || self.face_of[x1][t1] == self.face_of[x2][t2]
            }
            _ => true,
        }
    }

    /// `(arc, side)` of a dart.
    pub fn site_of(d: &LinkDiagram, (x, s): Dart) -> (ArcId, Side) {
        let c = &d.crossings()[x];
        (c.slots[s], if c.is_outgoing(s) { Side::L } else { Side::R })
    }
}

fn check_arc(d: &LinkDiagram, arc: ArcId) -> Result<()> {
    if arc == 0 || arc > d.num_arcs() {
        Err(Error::InvalidMove(format!("arc {arc} does not exist")))
    } else {
        Ok(())
    }
}

/// Result of applying a move, with the new label of every working edge id.
pub(crate) struct Applied {
    pub d: LinkDiagram,
    pub psi: GColoring,
    pub label: Vec<u32>,
    /// Working ids of edges created by the move, in creation order.
    pub created: Vec<usize>,
}

pub fn apply_move(
    d: &LinkDiagram,
    g: &FiniteGroup,
    psi: &GColoring,
    m: &MoveEvent,
) -> Result<(LinkDiagram, GColoring)> {
    apply_tracked(d, g, psi, m).map(|a| (a.d, a.psi))
}

pub(crate) fn apply_tracked(d: &LinkDiagram, g: &FiniteGroup, psi: &GColoring, m: &MoveEvent) -> Result<Applied> {
    if psi.values.len() != d.num_arcs() as usize {
        return Err(Error::InvalidMove("coloring does not match the diagram".into()));
    }
    let mut w = Work::from_diagram(d, &psi.values, g);
    let first_new = w.edges.len();
    match *m {
        MoveEvent::R1Add { arc, side, over } => {
            check_arc(d, arc)?;
            r1_add(&mut w, arc as usize - 1, side, over);
        }
        MoveEvent::R1Remove { crossing } => {
            if crossing >= d.num_crossings() || monogon_slot(d, crossing).is_none() {
                return Err(Error::InvalidMove(format!("crossing {crossing} bounds no monogon")));
            }
            w.remove_cross(crossing);
        }
        MoveEvent::R2Add {
            arc1,
            side1,
            arc2,
            side2,
            over,
        } => {
            check_arc(d, arc1)?;
            check_arc(d, arc2)?;
            if arc1 == arc2 {
                return Err(Error::InvalidMove("R2_add needs two distinct arcs".into()));
            }
            if !Regions::new(d).share_region(arc1, side1, arc2, side2) {
                return Err(Error::InvalidMove(format!(
                    "arcs {arc1}{side1} and {arc2}{side2} do not share a face"
                )));
            }
            r2_add(&mut w, (arc1 as usize - 1, side1), (arc2 as usize - 1, side2), over)?;
        }
        MoveEvent::R2Remove { arc, side } => {
            check_arc(d, arc)?;
            let (x, y) = bigon(d, &Regions::new(d), arc, side)?;
            w.remove_cross(x);
            w.remove_cross(y);
        }
        MoveEvent::R3 { arc, side } => {
            check_arc(d, arc)?;
            let tri = triangle(&Regions::new(d), arc, side)?;
            r3(&mut w, &tri)?;
        }
        MoveEvent::Saddle {
            arc1,
            side1,
            arc2,
            side2,
        } => {
            check_arc(d, arc1)?;
            check_arc(d, arc2)?;
            if arc1 == arc2 {
                return Err(Error::InvalidMove("a saddle needs two distinct arcs".into()));
            }
            if !Regions::new(d).share_region(arc1, side1, arc2, side2) {
                return Err(Error::InvalidMove(format!(
                    "arcs {arc1}{side1} and {arc2}{side2} do not share a face"
                )));
            }
            let (c1, c2) = (psi.get(arc1), psi.get(arc2));
            if c1 != c2 {
                return Err(Error::ColorMismatch(format!(
                    "arc {arc1} is {} but arc {arc2} is {}",
                    g.name(c1),
                    g.name(c2)
                )));
            }
            if side1 != side2 && !g.is_involution(c1) {
                return Err(Error::InvalidMove(format!(
                    "orientations at arcs {arc1} and {arc2} are incompatible and {} is not an involution",
                    g.name(c1)
                )));
            }
            saddle(&mut w, (arc1 as usize - 1, side1), (arc2 as usize - 1, side2));
        }
    }
    let created = (first_new..w.edges.len()).collect();
    let (d2, colors, label) = w.finish_tracked()?;
    Ok(Applied {
        d: d2,
        psi: GColoring::new(colors),
        label,
        created,
    })
}

/// Slot `s` such that one arc joins slots `s` and `s + 1` of crossing `x`.
pub fn monogon_slot(d: &LinkDiagram, x: usize) -> Option<usize> {
    let c = &d.crossings()[x];
    (0..4).find(|&s| c.slots[s] == c.slots[(s + 1) % 4])
}

fn r1_add(w: &mut Work, e: usize, side: Side, over: bool) {
    let x = w.new_cross(if over { 1 } else { 0 });
    let passes = w.subdivide(e, 2);
    // slots S=0, E=1, N=2, W=3; the first passage runs S -> N
    let second = match side {
        Side::L => (3, 1),
        Side::R => (1, 3),
    };
    for (k, (i, o)) in [(0, 2), second].into_iter().enumerate() {
        let (pin, pout) = passes[k];
        w.attach_head(pin, x, i);
        w.attach_tail(pout, x, o);
    }
}

fn attach_run(w: &mut Work, e: usize, route: &[(usize, usize, usize)]) -> Vec<usize> {
    let passes = w.subdivide(e, route.len());
    for (k, &(x, i, o)) in route.iter().enumerate() {
        let (pin, pout) = passes[k];
        w.attach_head(pin, x, i);
        w.attach_tail(pout, x, o);
    }
    let mut run = vec![passes[0].0];
    run.extend(passes.iter().map(|p| p.1));
    run
}

/// Orients a route given in face-traversal order along the arc.
fn oriented(route: [(usize, usize, usize); 2], side: Side) -> [(usize, usize, usize); 2] {
    match side {
        Side::L => route,
        Side::R => {
            let [(a, ai, ao), (b, bi, bo)] = route;
            [(b, bo, bi), (a, ao, ai)]
        }
    }
}

fn r2_add(w: &mut Work, (e1, s1): (usize, Side), (e2, s2): (usize, Side), over: bool) -> Result<()> {
    let axis = if over { 1 } else { 0 };
    let x = w.new_cross(axis);
    let y = w.new_cross(axis);
    // e1 enters X from the south and leaves Y to the south; e2 runs east to west
    // through Y, then X.
    let r1 = oriented([(x, 0, 2), (y, 2, 0)], s1);
    let r2 = oriented([(y, 1, 3), (x, 1, 3)], s2);
    let run1 = attach_run(w, e1, &r1);
    let run2 = attach_run(w, e2, &r2);
    w.propagate(if over { &run2 } else { &run1 })
}

fn saddle(w: &mut Work, (e1, s1): (usize, Side), (e2, s2): (usize, Side)) {
    let (l1, l2) = (w.is_loop(e1), w.is_loop(e2));
    if l1 || l2 {
        let (keep, gone) = if l1 { (e2, e1) } else { (e1, e2) };
        w.edges[keep].key = w.edges[keep].key.min(w.edges[gone].key);
        w.kill_edge(gone);
        return;
    }
    if s1 == s2 {
        let (h1, h2) = (w.edges[e1].head.unwrap(), w.edges[e2].head.unwrap());
        w.attach_head(e1, h2.0, h2.1);
        w.attach_head(e2, h1.0, h1.1);
        return;
    }
    // traversal ends: e_i runs X_i -> Y_i along the shared face
    let ends = |w: &Work, e: usize, s: Side| {
        let (t, h) = (w.edges[e].tail.unwrap(), w.edges[e].head.unwrap());
        if s == Side::L {
            (t, h)
        } else {
            (h, t)
        }
    };
    let (x1, y1) = ends(w, e1, s1);
    let (x2, y2) = ends(w, e2, s2);
    w.attach_tail(e1, x1.0, x1.1);
    w.attach_head(e1, y2.0, y2.1);
    w.attach_tail(e2, x2.0, x2.1);
    w.attach_head(e2, y1.0, y1.1);
    w.reorient_from(e1);
    w.reorient_from(e2);
}

/// Crossings `(x, y)` of a removable bigon on `side` of `arc`.
pub(crate) fn bigon(d: &LinkDiagram, r: &Regions, arc: ArcId, side: Side) -> Result<(usize, usize)> {
    let bad = |why: &str| Error::InvalidMove(format!("R2_remove at {arc}{side}: {why}"));
    let f = r.face(arc, side).ok_or_else(|| bad("arc has no crossings"))?;
    let face = &r.faces()[f];
    if face.len() != 2 || face[0].0 == face[1].0 {
        return Err(bad("face is not a bigon"));
    }
    let (x, sx) = face[0];
    let (y, sy) = face[1];
    // the arc leaving x along sx reaches y at (sy + 1); at x it is over iff odd slot
    let ex = d.crossings()[x].slots[sx];
    let ey = d.crossings()[y].slots[(sy + 1) % 4];
    debug_assert_eq!(ex, ey);
    let over_x = is_over(sx);
    let over_y = is_over((sy + 1) % 4);
    if over_x != over_y {
        return Err(bad("strands alternate around the bigon"));
    }
    Ok((x, y))
}

fn is_over(s: usize) -> bool {
    s % 2 == 1
}

/// Departure darts of a triangle face in traversal order.
fn triangle(r: &Regions, arc: ArcId, side: Side) -> Result<[Dart; 3]> {
    let bad = |why: &str| Error::InvalidMove(format!("R3 at {arc}{side}: {why}"));
    let f = r.face(arc, side).ok_or_else(|| bad("arc has no crossings"))?;
    let face = &r.faces()[f];
    if face.len() != 3 {
        return Err(bad("face is not a triangle"));
    }
    let tri = [face[0], face[1], face[2]];
    if tri[0].0 == tri[1].0 || tri[1].0 == tri[2].0 || tri[0].0 == tri[2].0 {
        return Err(bad("triangle repeats a crossing"));
    }
    let ov = chord_over(&tri);
    // cyclic order c0 > c1 > c2 > c0 or its reverse means alternating
    let (o01, o02, o12) = (ov[0], ov[1], ov[2]);
    if (o01 && o12 && !o02) || (!o01 && !o12 && o02) {
        return Err(bad("strands alternate around the triangle"));
    }
    Ok(tri)
}

/// Over relations `[c0 over c1, c0 over c2, c1 over c2]` of the three chords
/// through a triangle (see `r3`).
fn chord_over(tri: &[Dart; 3]) -> [bool; 3] {
    let [(_, k0), (_, k1), (_, k2)] = *tri;
    [k0 % 2 == 1, (k1 + 1) % 2 == 1, k2 % 2 == 1]
}

fn r3(w: &mut Work, tri: &[Dart; 3]) -> Result<()> {
    let [(x0, k0), (x1, k1), (x2, k2)] = *tri;
    let ports = [
        (x0, (k0 + 2) % 4),
        (x0, (k0 + 3) % 4),
        (x1, (k1 + 2) % 4),
        (x1, (k1 + 3) % 4),
        (x2, (k2 + 2) % 4),
        (x2, (k2 + 3) % 4),
    ];
    let ext: Vec<usize> = ports.iter().map(|&(x, s)| w.cross[x].edges[s]).collect();
    let incoming: Vec<bool> = ports
        .iter()
        .zip(&ext)
        .map(|(&p, &e)| w.edges[e].head == Some(p))
        .collect();
    let interior = [w.cross[x0].edges[k0], w.cross[x2].edges[k2], w.cross[x1].edges[k1]];
    let [o01, o02, o12] = chord_over(tri);
    // A = c1 x c2 near ports 1,2; B = c0 x c1 near 3,4; C = c2 x c0 near 5,0
    let a = w.new_cross(if o12 { 1 } else { 0 });
    let b = w.new_cross(if o01 { 1 } else { 0 });
    let c = w.new_cross(if !o02 { 1 } else { 0 });
    for x in [x0, x1, x2] {
        w.cross[x].alive = false;
    }
    // chord: (port p, crossing near p, its slot toward p, its interior slot), same for q
    let chords = [
        ((0, c, 1, 3), (3, b, 0, 2)),
        ((1, a, 0, 2), (4, b, 1, 3)),
        ((2, a, 1, 3), (5, c, 0, 2)),
    ];
    let mut runs = Vec::new();
    for (ci, &((p, cp, sp, ip), (q, cq, sq, iq))) in chords.iter().enumerate() {
        let mid = interior[ci];
        let ((pi, xi, si, ii), (po, xo, so, io)) = if incoming[p] {
            ((p, cp, sp, ip), (q, cq, sq, iq))
        } else {
            ((q, cq, sq, iq), (p, cp, sp, ip))
        };
        w.attach_head(ext[pi], xi, si);
        w.attach_tail(mid, xi, ii);
        w.attach_head(mid, xo, io);
        w.attach_tail(ext[po], xo, so);
        runs.push([ext[pi], mid, ext[po]]);
    }
    // top strand first so over colors are known when needed
    let height = |c: usize| -> usize {
        let over = |a: usize, b: usize| match (a, b) {
            (0, 1) => o01,
            (1, 0) => !o01,
            (0, 2) => o02,
            (2, 0) => !o02,
            (1, 2) => o12,
            (2, 1) => !o12,
            _ => false,
        };
        (0..3).filter(|&o| o != c && over(o, c)).count()
    };
    let mut order = [0, 1, 2];
    order.sort_by_key(|&c| height(c));
    for c in order {
        w.propagate(&runs[c])?;
    }
    Ok(())
}

/// Every removal, R3 and saddle site, plus R1/R2 additions at canonical
/// positions, sorted by kind then site.
pub fn applicable_moves(d: &LinkDiagram, g: &FiniteGroup, psi: &GColoring) -> Vec<MoveEvent> {
    let mut out = applicable_reductions(d, g, psi);
    let r = Regions::new(d);
    let n = d.num_arcs();
    let sides = [Side::L, Side::R];
    for arc in 1..=n {
        for side in sides {
            for over in [false, true] {
                out.push(MoveEvent::R1Add { arc, side, over });
            }
        }
    }
    for arc1 in 1..=n {
        for arc2 in arc1 + 1..=n {
            for side1 in sides {
                for side2 in sides {
                    if r.share_region(arc1, side1, arc2, side2) {
                        for over in [false, true] {
                            out.push(MoveEvent::R2Add {
                                arc1,
                                side1,
                                arc2,
                                side2,
                                over,
                            });
                        }
                    }
                }
            }
        }
    }
    out.sort();
    out
}

/// Applicable moves that do not add crossings.
pub fn applicable_reductions(d: &LinkDiagram, g: &FiniteGroup, psi: &GColoring) -> Vec<MoveEvent> {
    let r = Regions::new(d);
    let mut out = Vec::new();
    for x in 0..d.num_crossings() {
        if monogon_slot(d, x).is_some() {
            out.push(MoveEvent::R1Remove { crossing: x });
        }
    }
    for face in r.faces() {
        let site = face.iter().map(|&dt| Regions::site_of(d, dt)).min().unwrap();
        let (arc, side) = site;
        if face.len() == 2 && bigon(d, &r, arc, side).is_ok() {
            out.push(MoveEvent::R2Remove { arc, side });
        }
        if face.len() == 3 && triangle(&r, arc, side).is_ok() {
            out.push(MoveEvent::R3 { arc, side });
        }
    }
    let n = d.num_arcs();
    let sides = [Side::L, Side::R];
    for arc1 in 1..=n {
        for arc2 in arc1 + 1..=n {
            let c = psi.get(arc1);
            if c != psi.get(arc2) {
                continue;
            }
            for side1 in sides {
                for side2 in sides {
                    if (side1 == side2 || g.is_involution(c)) && r.share_region(arc1, side1, arc2, side2) {
                        out.push(MoveEvent::Saddle {
                            arc1,
                            side1,
                            arc2,
                            side2,
                        });
                    }
                }
            }
        }
    }
    out.sort();
    out
}

/// Applies a sequence of moves.
pub fn replay(
    d: &LinkDiagram,
    g: &FiniteGroup,
    psi: &GColoring,
    moves: &[MoveEvent],
) -> Result<(LinkDiagram, GColoring)> {
    let mut cur = (d.clone(), psi.clone());
    for m in moves {
        cur = apply_move(&cur.0, g, &cur.1, m)?;
    }
    Ok(cur)
}

/// Changes crossing `x` between two equally colored strands, realized as a
/// saddle, a kink removal, a kink of the opposite type and a second saddle.
/// Returns the result and the moves used.
pub fn strand_crossing(
    d: &LinkDiagram,
    g: &FiniteGroup,
    psi: &GColoring,
    x: usize,
) -> Result<(LinkDiagram, GColoring, Vec<MoveEvent>)> {
    if x >= d.num_crossings() {
        return Err(Error::InvalidMove(format!("crossing {x} does not exist")));
    }
    let c = d.crossings()[x];
    let (o, u) = (psi.get(c.over_in()), psi.get(c.under_in()));
    if o != u {
        return Err(Error::ColorMismatch(format!(
            "strands at crossing {x} are {} and {}",
            g.name(o),
            g.name(u)
        )));
    }
    let mut moves = Vec::new();
    let mut step = |cur: &(LinkDiagram, GColoring), m: MoveEvent| -> Result<Applied> {
        let a = apply_tracked(&cur.0, g, &cur.1, &m)?;
        moves.push(m);
        Ok(a)
    };
    if let Some(s) = monogon_slot(d, x) {
        // already a kink: replace it by the opposite kink on the same side
        let loop_arc = c.slots[s];
        let ends = d.ends();
        let [t, h] = ends[loop_arc as usize - 1].unwrap();
        debug_assert_eq!(t.0, x);
        let side = if h.1 == (t.1 + 1) % 4 { Side::L } else { Side::R };
        let entering = (0..4)
            .find(|&k| k != s && k != (s + 1) % 4 && !c.is_outgoing(k))
            .unwrap();
        let carrier = c.slots[entering];
        let a = step(&(d.clone(), psi.clone()), MoveEvent::R1Remove { crossing: x })?;
        let arc = survivor(&a, &[carrier, loop_arc])?;
        let over = kink_over(side, -c.sign);
        let b = step(&(a.d, a.psi), MoveEvent::R1Add { arc, side, over })?;
        return Ok((b.d, b.psi, moves));
    }
    let (corner, side) = if c.sign > 0 { (0, Side::R) } else { (3, Side::L) };
    let (e1, e2) = (c.slots[corner], c.slots[(corner + 1) % 4]);
    let s1 = if c.is_outgoing(corner) { Side::L } else { Side::R };
    let s2 = if c.is_outgoing((corner + 1) % 4) {
        Side::R
    } else {
        Side::L
    };
    let a = step(
        &(d.clone(), psi.clone()),
        MoveEvent::Saddle {
            arc1: e1,
            side1: s1,
            arc2: e2,
            side2: s2,
        },
    )?;
    // the saddle leaves crossing x as a kink
    let (f_arc, g_arc) = (survivor(&a, &[c.under_in()])?, survivor(&a, &[c.over_in()])?);
    let b = step(&(a.d, a.psi), MoveEvent::R1Remove { crossing: x })?;
    let (f_arc, g_arc) = (survivor(&b, &[f_arc])?, survivor(&b, &[g_arc])?);
    let k = step(
        &(b.d, b.psi),
        MoveEvent::R1Add {
            arc: g_arc,
            side,
            over: false,
        },
    )?;
    let f_arc = survivor(&k, &[f_arc])?;
    let loop_arc = k.label[k.created[0]];
    let sd = side.flip();
    let last = step(
        &(k.d, k.psi),
        MoveEvent::Saddle {
            arc1: f_arc,
            side1: sd,
            arc2: loop_arc,
            side2: sd,
        },
    )?;
    Ok((last.d, last.psi, moves))
}

/// New label of the first of `arcs` that survived a move.
fn survivor(a: &Applied, arcs: &[ArcId]) -> Result<ArcId> {
    arcs.iter()
        .map(|&x| a.label[x as usize - 1])
        .find(|&l| l != 0)
        .ok_or_else(|| Error::InvalidMove("lost track of an arc".into()))
}

/// `over` flag of a kink on `side` whose crossing gets sign `sign`.
pub fn kink_over(side: Side, sign: i8) -> bool {
    match side {
        Side::L => sign < 0,
        Side::R => sign > 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{braid_closure, builtin_diagram};
    use crate::coloring::{enumerate_tricolorings, validate_coloring};
    use crate::group::builtin_sigma3;
    use crate::oracle::canonical_form;

    fn plain(d: &LinkDiagram) -> GColoring {
        GColoring::constant(d, 0)
    }

    fn form(d: &LinkDiagram, psi: &GColoring) -> crate::oracle::CanonicalForm {
        canonical_form(d, psi).unwrap()
    }

    #[test]
    fn log_round_trip() {
        let moves = vec![
            MoveEvent::R1Add {
                arc: 3,
                side: Side::L,
                over: true,
            },
            MoveEvent::R1Remove { crossing: 0 },
            MoveEvent::R2Add {
                arc1: 1,
                side1: Side::R,
                arc2: 4,
                side2: Side::L,
                over: false,
            },
            MoveEvent::R2Remove { arc: 2, side: Side::R },
            MoveEvent::R3 { arc: 5, side: Side::L },
            MoveEvent::Saddle {
                arc1: 1,
                side1: Side::L,
                arc2: 4,
                side2: Side::L,
            },
        ];
        let text = serialize_log(&moves);
        assert_eq!(parse_log(&text).unwrap(), moves);
        assert!(parse_log("R4 1 L").is_err());
    }

    #[test]
    fn r1_add_then_remove_restores_exactly() {
        let (g, _) = builtin_sigma3();
        for name in ["unknot", "trefoil_left", "hopf"] {
            let d = builtin_diagram(name).unwrap();
            for psi in enumerate_tricolorings(&d) {
                for m in applicable_moves(&d, &g, &psi) {
                    if !matches!(m, MoveEvent::R1Add { .. }) {
                        continue;
                    }
                    let (d2, p2) = apply_move(&d, &g, &psi, &m).unwrap();
                    validate_coloring(&d2, &g, None, &p2).unwrap();
                    let x = d2.num_crossings() - 1;
                    let back = apply_move(&d2, &g, &p2, &MoveEvent::R1Remove { crossing: x });
                    assert_eq!(back.unwrap(), (d.clone(), psi.clone()), "{name} {m}");
                }
            }
        }
    }

    #[test]
    fn kinks_on_the_unknot() {
        let (g, _) = builtin_sigma3();
        let d = LinkDiagram::unknot();
        let psi = plain(&d);
        let forms: Vec<_> = applicable_moves(&d, &g, &psi)
            .iter()
            .map(|m| {
                let (d2, p2) = apply_move(&d, &g, &psi, m).unwrap();
                form(&d2, &p2)
            })
            .collect();
        assert_eq!(forms.len(), 4);
        for w in [[1], [-1]] {
            let k = braid_closure(2, &w).unwrap();
            assert!(forms.contains(&form(&k, &plain(&k))));
        }
        let mut distinct = forms.clone();
        distinct.sort();
        distinct.dedup();
        // on the sphere a left kink and a right kink of the same sign agree
        assert_eq!(distinct.len(), 2);
    }

    #[test]
    fn r2_add_on_two_loops_gives_a_clasp_and_back() {
        let (g, _) = builtin_sigma3();
        let d = braid_closure(2, &[]).unwrap();
        let psi = plain(&d);
        let targets: Vec<_> = [[1, -1], [-1, 1]]
            .iter()
            .map(|w| {
                let t = braid_closure(2, w).unwrap();
                form(&t, &plain(&t))
            })
            .collect();
        let mut hit = false;
        for m in applicable_moves(&d, &g, &psi) {
            if let MoveEvent::R2Add { .. } = m {
                let (d2, p2) = apply_move(&d, &g, &psi, &m).unwrap();
                hit |= targets.contains(&form(&d2, &p2));
                let undo: Vec<_> = applicable_reductions(&d2, &g, &p2)
                    .into_iter()
                    .filter(|r| matches!(r, MoveEvent::R2Remove { .. }))
                    .collect();
                assert!(!undo.is_empty(), "{m}");
                let (d3, p3) = apply_move(&d2, &g, &p2, &undo[0]).unwrap();
                assert_eq!(form(&d3, &p3), form(&d, &psi), "{m}");
            }
        }
        assert!(hit);
    }

    #[test]
    fn r3_is_the_braid_relation() {
        let (g, _) = builtin_sigma3();
        let d = braid_closure(3, &[1, 2, 1]).unwrap();
        let t = braid_closure(3, &[2, 1, 2]).unwrap();
        let target = form(&t, &plain(&t));
        let mut hit = false;
        for m in applicable_reductions(&d, &g, &plain(&d)) {
            if let MoveEvent::R3 { .. } = m {
                let (d2, p2) = apply_move(&d, &g, &plain(&d), &m).unwrap();
                hit |= form(&d2, &p2) == target;
                // some R3 on the result undoes it
                let back = applicable_reductions(&d2, &g, &p2).into_iter().any(|r| {
                    matches!(r, MoveEvent::R3 { .. })
                        && apply_move(&d2, &g, &p2, &r)
                            .map(|(d3, p3)| form(&d3, &p3) == form(&d, &plain(&d)))
                            .unwrap_or(false)
                });
                assert!(back, "{m}");
            }
        }
        assert!(hit);
    }

    #[test]
    fn alternating_triangles_are_not_r3_sites() {
        let (g, _) = builtin_sigma3();
        let d = builtin_diagram("trefoil_left").unwrap();
        let moves = applicable_reductions(&d, &g, &plain(&d));
        assert!(!moves.iter().any(|m| matches!(m, MoveEvent::R3 { .. })));
    }

    #[test]
    fn every_listed_move_keeps_colorings_valid() {
        let (g, _) = builtin_sigma3();
        for name in ["trefoil_left", "hopf", "figure_eight"] {
            let d = builtin_diagram(name).unwrap();
            let before = enumerate_tricolorings(&d).len();
            for psi in enumerate_tricolorings(&d).into_iter().take(4) {
                for m in applicable_moves(&d, &g, &psi) {
                    let (d2, p2) = apply_move(&d, &g, &psi, &m).unwrap();
                    validate_coloring(&d2, &g, None, &p2).unwrap();
                    if m.is_reidemeister() {
                        assert_eq!(enumerate_tricolorings(&d2).len(), before, "{name} {m}");
                    }
                }
            }
        }
    }

    #[test]
    fn saddle_needs_equal_colors() {
        let (g, _) = builtin_sigma3();
        let d = braid_closure(2, &[]).unwrap();
        let psi = GColoring::new(vec![1, 2]);
        let m = MoveEvent::Saddle {
            arc1: 1,
            side1: Side::L,
            arc2: 2,
            side2: Side::L,
        };
        assert!(matches!(apply_move(&d, &g, &psi, &m), Err(Error::ColorMismatch(_))));
        let same = GColoring::new(vec![1, 1]);
        let (d2, _) = apply_move(&d, &g, &same, &m).unwrap();
        assert_eq!(d2.loops().len(), 1);
    }

    #[test]
    fn unknot_has_no_saddle() {
        let (g, _) = builtin_sigma3();
        let d = LinkDiagram::unknot();
        assert!(applicable_reductions(&d, &g, &plain(&d)).is_empty());
    }

    fn changed(d: &LinkDiagram, x: usize) -> LinkDiagram {
        let mut slots: Vec<[u32; 4]> = d.crossings().iter().map(|c| c.slots).collect();
        let [a, b, c, e] = slots[x];
        slots[x] = if d.crossings()[x].sign > 0 {
            [e, a, b, c]
        } else {
            [b, c, e, a]
        };
        LinkDiagram::from_pd(slots, d.loops().to_vec()).unwrap()
    }

    #[test]
    fn strand_crossing_changes_the_crossing() {
        let (g, _) = builtin_sigma3();
        for name in ["trefoil_left", "trefoil_right", "figure_eight", "hopf"] {
            let d = builtin_diagram(name).unwrap();
            let psi = GColoring::constant(&d, 1);
            for x in 0..d.num_crossings() {
                let (d2, p2, moves) = strand_crossing(&d, &g, &psi, x).unwrap();
                assert_eq!(moves.len(), 4);
                let want = changed(&d, x);
                assert_eq!(
                    form(&d2, &p2),
                    form(&want, &GColoring::constant(&want, 1)),
                    "{name} {x}"
                );
                assert_eq!(replay(&d, &g, &psi, &moves).unwrap(), (d2, p2));
            }
        }
    }

    #[test]
    fn strand_crossing_flips_a_kink() {
        let (g, _) = builtin_sigma3();
        let d = braid_closure(2, &[1]).unwrap();
        let psi = GColoring::constant(&d, 2);
        let (d2, p2, moves) = strand_crossing(&d, &g, &psi, 0).unwrap();
        assert_eq!(moves.len(), 2);
        let want = changed(&d, 0);
        assert_eq!(form(&d2, &p2), form(&want, &GColoring::constant(&want, 2)));
    }
}
