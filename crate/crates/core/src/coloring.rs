//! Group colorings of diagrams.
//!
//! A coloring assigns a group element to every edge label. Both edges of an
//! over-strand at a crossing carry the same value, so a coloring is really a
//! function on the arcs of the diagram, stored per edge for convenience.

use std::collections::BTreeMap;

use crate::diagram::{ColorBlock, LinkDiagram, UnionFind};
use crate::error::{Error, Result};
use crate::group::{builtin_sigma3, group_from_token, Elem, FiniteGroup, StabilizerSet};

pub const DEFAULT_NODE_BUDGET: u64 = 50_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GColoring {
    /// Value of edge `a` at index `a - 1`.
    pub values: Vec<Elem>,
}

impl GColoring {
    pub fn new(values: Vec<Elem>) -> Self {
        Self { values }
    }

    pub fn constant(d: &LinkDiagram, g: Elem) -> Self {
        Self {
            values: vec![g; d.num_arcs() as usize],
        }
    }

    pub fn get(&self, arc: u32) -> Elem {
        self.values[arc as usize - 1]
    }

    pub fn is_constant(&self) -> bool {
        self.values.windows(2).all(|w| w[0] == w[1])
    }

    pub fn conjugate(&self, g: &FiniteGroup, h: Elem) -> Self {
        Self {
            values: self.values.iter().map(|&v| g.conj(h, v)).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Color {
    R,
    G,
    B,
}

impl Color {
    pub const ALL: [Color; 3] = [Color::R, Color::G, Color::B];

    /// Σ₃ element of this color (`s12`, `s13`, `s23`).
    pub fn element(self) -> Elem {
        self as usize + 1
    }

    pub fn from_element(g: Elem) -> Option<Color> {
        match g {
            1 => Some(Color::R),
            2 => Some(Color::G),
            3 => Some(Color::B),
            _ => None,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            Color::R => "R",
            Color::G => "G",
            Color::B => "B",
        }
    }

    pub fn z3(self) -> u8 {
        self as u8
    }

    pub fn from_z3(v: u8) -> Color {
        Color::ALL[(v % 3) as usize]
    }
}

/// Tricoloring as plain colors; converts to and from Σ₃ colorings.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tricoloring {
    pub colors: Vec<Color>,
}

impl Tricoloring {
    pub fn to_gcoloring(&self) -> GColoring {
        GColoring::new(self.colors.iter().map(|c| c.element()).collect())
    }

    pub fn from_gcoloring(psi: &GColoring) -> Option<Self> {
        psi.values
            .iter()
            .map(|&v| Color::from_element(v))
            .collect::<Option<Vec<_>>>()
            .map(|colors| Self { colors })
    }

    /// All-same or all-distinct at every crossing.
    pub fn is_valid(&self, d: &LinkDiagram) -> bool {
        d.crossings().iter().all(|c| {
            let col = |a: u32| self.colors[a as usize - 1];
            let (o1, o2) = (col(c.slots[1]), col(c.slots[3]));
            let (u, v) = (col(c.under_in()), col(c.under_out()));
            o1 == o2 && (u.z3() + v.z3() + 2 * (3 - o1.z3())) % 3 == 0
        })
    }
}

/// Checks Wirtinger relations and, if given, the stabilizer condition.
pub fn validate_coloring(d: &LinkDiagram, g: &FiniteGroup, s: Option<&StabilizerSet>, psi: &GColoring) -> Result<()> {
    if psi.values.len() != d.num_arcs() as usize {
        return Err(Error::Coloring(format!(
            "coloring has {} values for {} arcs",
            psi.values.len(),
            d.num_arcs()
        )));
    }
    for (i, &v) in psi.values.iter().enumerate() {
        if v >= g.order() {
            return Err(Error::Coloring(format!(
                "arc {}: element index {v} out of range",
                i + 1
            )));
        }
        if let Some(s) = s {
            if !s.contains(v) {
                return Err(Error::Coloring(format!(
                    "arc {}: {} is not in the stabilizer set",
                    i + 1,
                    g.name(v)
                )));
            }
        }
    }
    for (i, c) in d.crossings().iter().enumerate() {
        let (o, o2) = (psi.get(c.slots[1]), psi.get(c.slots[3]));
        if o != o2 {
            return Err(Error::Coloring(format!(
                "crossing {i}: over-strand arcs {} and {} differ",
                c.slots[1], c.slots[3]
            )));
        }
        let (u, w) = (psi.get(c.under_in()), psi.get(c.under_out()));
        if wirtinger(g, c.sign, o, u) != w {
            return Err(Error::Coloring(format!(
                "crossing {i}: Wirtinger relation fails ({} over {} -> {})",
                g.name(o),
                g.name(u),
                g.name(w)
            )));
        }
    }
    Ok(())
}

/// Outgoing under-value at a crossing of the given sign.
pub fn wirtinger(g: &FiniteGroup, sign: i8, over: Elem, under_in: Elem) -> Elem {
    if sign > 0 {
        g.conj(over, under_in)
    } else {
        g.conj(g.inv(over), under_in)
    }
}

/// Wirtinger arcs: maximal runs of edges joined by over-passages. Returns the
/// arc index of every edge and the number of arcs, arcs ordered by their
/// smallest edge.
pub fn wirtinger_arcs(d: &LinkDiagram) -> (Vec<usize>, usize) {
    let n = d.num_arcs() as usize;
    let mut uf = UnionFind::new(n);
    for c in d.crossings() {
        uf.union(c.slots[1] as usize - 1, c.slots[3] as usize - 1);
    }
    let mut ids = BTreeMap::new();
    let mut of = vec![0; n];
    for (e, slot) in of.iter_mut().enumerate() {
        let r = uf.find(e);
        let next = ids.len();
        *slot = *ids.entry(r).or_insert(next);
    }
    (of, ids.len())
}

/// All (G, S)-colorings in lexicographic order of their edge values.
pub fn enumerate_colorings(d: &LinkDiagram, g: &FiniteGroup, s: &StabilizerSet) -> Result<Vec<GColoring>> {
    enumerate_colorings_with_budget(d, g, s, DEFAULT_NODE_BUDGET)
}

pub fn enumerate_colorings_with_budget(
    d: &LinkDiagram,
    g: &FiniteGroup,
    s: &StabilizerSet,
    budget: u64,
) -> Result<Vec<GColoring>> {
    let (arc_of, m) = wirtinger_arcs(d);
    // (sign, over, under_in, under_out) on arc indices
    let rels: Vec<(i8, usize, usize, usize)> = d
        .crossings()
        .iter()
        .map(|c| {
            let a = |x: u32| arc_of[x as usize - 1];
            (c.sign, a(c.slots[1]), a(c.under_in()), a(c.under_out()))
        })
        .collect();
    let mut touching: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (k, &(_, o, u, w)) in rels.iter().enumerate() {
        for a in [o, u, w] {
            if !touching[a].contains(&k) {
                touching[a].push(k);
            }
        }
    }
    let members: Vec<Elem> = s.members().collect();
    let mut search = Search {
        g,
        s,
        rels: &rels,
        touching: &touching,
        values: vec![None; m],
        nodes: 0,
        budget,
        found: Vec::new(),
    };
    search.run(&members)?;
    let mut out: Vec<GColoring> = search
        .found
        .into_iter()
        .map(|vals| GColoring::new(arc_of.iter().map(|&a| vals[a]).collect()))
        .collect();
    out.sort();
    Ok(out)
}

struct Search<'a> {
    g: &'a FiniteGroup,
    s: &'a StabilizerSet,
    rels: &'a [(i8, usize, usize, usize)],
    touching: &'a [Vec<usize>],
    values: Vec<Option<Elem>>,
    nodes: u64,
    budget: u64,
    found: Vec<Vec<Elem>>,
}

impl Search<'_> {
    fn run(&mut self, members: &[Elem]) -> Result<()> {
        let Some(next) = self.values.iter().position(Option::is_none) else {
            self.found.push(self.values.iter().map(|v| v.unwrap()).collect());
            return Ok(());
        };
        for &v in members {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(Error::ResourceBound(format!(
                    "coloring search exceeded {} nodes",
                    self.budget
                )));
            }
            let saved = self.values.clone();
            if self.assign(next, v) {
                self.run(members)?;
            }
            self.values = saved;
        }
        Ok(())
    }

    /// Sets `arc = v` and propagates forced values; false on contradiction.
    fn assign(&mut self, arc: usize, v: Elem) -> bool {
        let mut stack = vec![(arc, v)];
        while let Some((a, v)) = stack.pop() {
            match self.values[a] {
                Some(w) if w == v => continue,
                Some(_) => return false,
                None => {}
            }
            if !self.s.contains(v) {
                return false;
            }
            self.values[a] = Some(v);
            for &k in &self.touching[a] {
                let (sign, o, u, w) = self.rels[k];
                let (vo, vu, vw) = (self.values[o], self.values[u], self.values[w]);
                match (vo, vu, vw) {
                    (Some(o), Some(u), Some(w)) => {
                        if wirtinger(self.g, sign, o, u) != w {
                            return false;
                        }
                    }
                    (Some(ov), Some(uv), None) => stack.push((w, wirtinger(self.g, sign, ov, uv))),
                    (Some(ov), None, Some(wv)) => stack.push((u, wirtinger(self.g, -sign, ov, wv))),
                    _ => {}
                }
            }
        }
        true
    }
}

/// Tricolorings by linear algebra over Z₃; returns Σ₃ colorings sorted like
/// `enumerate_colorings`.
pub fn enumerate_tricolorings(d: &LinkDiagram) -> Vec<GColoring> {
    let (arc_of, m) = wirtinger_arcs(d);
    // rows: 2·o − u − w ≡ 0
    let mut rows: Vec<Vec<u8>> = d
        .crossings()
        .iter()
        .map(|c| {
            let mut r = vec![0u8; m];
            let a = |x: u32| arc_of[x as usize - 1];
            r[a(c.slots[1])] = (r[a(c.slots[1])] + 2) % 3;
            r[a(c.under_in())] = (r[a(c.under_in())] + 2) % 3;
            r[a(c.under_out())] = (r[a(c.under_out())] + 2) % 3;
            r
        })
        .collect();
    // reduced row echelon form
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..m {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = rows[rank][col]; // 1 and 2 are self-inverse mod 3
        for x in rows[rank].iter_mut() {
            *x = (*x * inv) % 3;
        }
        for r in 0..rows.len() {
            if r != rank && rows[r][col] != 0 {
                let f = rows[r][col];
                let pivot = rows[rank].clone();
                for (v, p) in rows[r].iter_mut().zip(&pivot) {
                    *v = (*v + 3 * 3 - f * p) % 3;
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    let free: Vec<usize> = (0..m).filter(|c| !pivots.contains(c)).collect();
    let mut out = Vec::new();
    let total = 3usize.pow(free.len() as u32);
    for mut code in 0..total {
        let mut x = vec![0u8; m];
        for &f in &free {
            x[f] = (code % 3) as u8;
            code /= 3;
        }
        for (r, &p) in pivots.iter().enumerate() {
            let s: u32 = free.iter().map(|&f| rows[r][f] as u32 * x[f] as u32).sum();
            x[p] = ((3 - s % 3) % 3) as u8;
        }
        out.push(GColoring::new(
            arc_of.iter().map(|&a| Color::from_z3(x[a]).element()).collect(),
        ));
    }
    out.sort();
    out
}

/// Groups colorings that differ by a global conjugation; classes and their
/// members keep input order.
pub fn conjugation_classes(colorings: &[GColoring], g: &FiniteGroup) -> Vec<Vec<GColoring>> {
    let mut classes: Vec<Vec<GColoring>> = Vec::new();
    for psi in colorings {
        let pos = classes
            .iter()
            .position(|cls| (0..g.order()).any(|h| psi.conjugate(g, h) == cls[0]));
        match pos {
            Some(i) => classes[i].push(psi.clone()),
            None => classes.push(vec![psi.clone()]),
        }
    }
    classes
}

/// Group and coloring described by a KLD coloring block. Values may be given
/// for a single edge of each arc; the rest are filled along over-passages.
pub fn coloring_from_block(
    d: &LinkDiagram,
    block: &ColorBlock,
) -> Result<Option<(FiniteGroup, StabilizerSet, GColoring)>> {
    if block.entries.is_empty() && block.group.is_none() {
        return Ok(None);
    }
    let (g, s) = match &block.group {
        Some(t) => group_from_token(t)?,
        None => builtin_sigma3(),
    };
    let n = d.num_arcs() as usize;
    let (arc_of, m) = wirtinger_arcs(d);
    let mut per_arc: Vec<Option<Elem>> = vec![None; m];
    for (arc, tok) in &block.entries {
        if *arc as usize > n {
            return Err(Error::Coloring(format!("arc {arc} does not exist")));
        }
        let v = resolve_token(&g, tok)?;
        let slot = &mut per_arc[arc_of[*arc as usize - 1]];
        match slot {
            Some(w) if *w != v => {
                return Err(Error::Coloring(format!(
                    "arc {arc}: conflicting values along one over-strand"
                )))
            }
            _ => *slot = Some(v),
        }
    }
    let mut values = Vec::with_capacity(n);
    for e in 0..n {
        match per_arc[arc_of[e]] {
            Some(v) => values.push(v),
            None => return Err(Error::Coloring(format!("arc {} has no color", e + 1))),
        }
    }
    let psi = GColoring::new(values);
    validate_coloring(d, &g, Some(&s), &psi)?;
    Ok(Some((g, s, psi)))
}

fn resolve_token(g: &FiniteGroup, tok: &str) -> Result<Elem> {
    let alias = match tok {
        "R" => Some("s12"),
        "G" => Some("s13"),
        "B" => Some("s23"),
        _ => None,
    };
    alias
        .and_then(|a| g.element(a))
        .or_else(|| g.element(tok))
        .ok_or_else(|| Error::Coloring(format!("unknown color token `{tok}`")))
}

/// Token used when writing a value back out: R/G/B for Σ₃ inversions.
pub fn element_token(g: &FiniteGroup, v: Elem) -> String {
    match (g.order(), g.name(v)) {
        (6, "s12") => "R".into(),
        (6, "s13") => "G".into(),
        (6, "s23") => "B".into(),
        (_, name) => name.to_string(),
    }
}

/// Transports a tricoloring to the mirror diagram. Colors are read as Z₃
/// values; a region labelling `r` with `x = r_left + r_right` is rebuilt on
/// the mirror with the sign of `r` flipped on one checkerboard class.
pub fn mirror_tricoloring(d: &LinkDiagram, psi: &GColoring) -> Result<GColoring> {
    let z = |v: Elem| {
        Color::from_element(v)
            .map(Color::z3)
            .ok_or_else(|| Error::Coloring("mirror transport needs a tricoloring".into()))
    };
    let faces = d.faces();
    let mut face_of = vec![[0usize; 4]; d.num_crossings()];
    for (f, face) in faces.iter().enumerate() {
        for &(x, s) in face {
            face_of[x][s] = f;
        }
    }
    let ends = d.ends();
    // (left face, right face) per crossing edge
    let sides: Vec<Option<(usize, usize)>> = ends
        .iter()
        .map(|e| e.map(|[t, h]| (face_of[t.0][t.1], face_of[h.0][h.1])))
        .collect();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); faces.len()];
    for (e, s) in sides.iter().enumerate() {
        if let Some((l, r)) = *s {
            adj[l].push((r, e));
            adj[r].push((l, e));
        }
    }
    let mut region: Vec<Option<(u8, u8)>> = vec![None; faces.len()]; // (value, parity)
    for start in 0..faces.len() {
        if region[start].is_some() {
            continue;
        }
        region[start] = Some((0, 0));
        let mut stack = vec![start];
        while let Some(f) = stack.pop() {
            let (rv, par) = region[f].unwrap();
            for &(h, e) in &adj[f] {
                let x = z(psi.values[e])?;
                let want = ((x + 3 - rv) % 3, 1 - par);
                match region[h] {
                    None => {
                        region[h] = Some(want);
                        stack.push(h);
                    }
                    Some(got) if got != want => return Err(Error::Coloring("coloring is not a Fox coloring".into())),
                    _ => {}
                }
            }
        }
    }
    let mut out = Vec::with_capacity(psi.values.len());
    for (e, s) in sides.iter().enumerate() {
        let v = match *s {
            None => z(psi.values[e])?,
            Some((l, r)) => {
                let (lv, lp) = region[l].unwrap();
                let (rv, _) = region[r].unwrap();
                let (black, white) = if lp == 0 { (lv, rv) } else { (rv, lv) };
                (black + 3 - white) % 3
            }
        };
        out.push(Color::from_z3(v).element());
    }
    Ok(GColoring::new(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::builtin_diagram;
    use crate::diagram::parse_kld;
    use crate::group::builtin_dihedral;

    fn sigma() -> (FiniteGroup, StabilizerSet) {
        builtin_sigma3()
    }

    #[test]
    fn trefoil_examples() {
        let (g, s) = sigma();
        let d = builtin_diagram("trefoil_left").unwrap();
        let (arc_of, m) = wirtinger_arcs(&d);
        assert_eq!(m, 3);
        let mono = GColoring::constant(&d, 1);
        assert!(validate_coloring(&d, &g, Some(&s), &mono).is_ok());
        let cyc = GColoring::new(arc_of.iter().map(|&a| a + 1).collect());
        assert!(validate_coloring(&d, &g, Some(&s), &cyc).is_ok());
        let two = GColoring::new(arc_of.iter().map(|&a| if a == 2 { 2 } else { 1 }).collect());
        let err = validate_coloring(&d, &g, Some(&s), &two).unwrap_err();
        assert!(matches!(err, Error::Coloring(ref m) if m.contains("crossing")), "{err}");
    }

    #[test]
    fn stabilizer_is_enforced() {
        let (g, s) = sigma();
        let d = LinkDiagram::unknot();
        let err = validate_coloring(&d, &g, Some(&s), &GColoring::new(vec![4])).unwrap_err();
        assert!(matches!(err, Error::Coloring(_)));
        assert!(validate_coloring(&d, &g, None, &GColoring::new(vec![4])).is_ok());
    }

    #[test]
    fn counts() {
        let (g, s) = sigma();
        for (name, n) in [("unknot", 3), ("trefoil_right", 9), ("figure_eight", 3), ("hopf", 3)] {
            let d = builtin_diagram(name).unwrap();
            assert_eq!(enumerate_colorings(&d, &g, &s).unwrap().len(), n, "{name}");
        }
        let (d5, r5) = builtin_dihedral(5).unwrap();
        let t = builtin_diagram("torus_2_5").unwrap();
        assert_eq!(enumerate_colorings(&t, &d5, &r5).unwrap().len(), 25);
    }

    #[test]
    fn budget_is_enforced() {
        let (g, s) = sigma();
        let d = builtin_diagram("square_knot").unwrap();
        assert!(matches!(
            enumerate_colorings_with_budget(&d, &g, &s, 3),
            Err(Error::ResourceBound(_))
        ));
    }

    #[test]
    fn fast_path_matches_generic() {
        let (g, s) = sigma();
        for name in crate::catalog::CATALOG {
            let d = builtin_diagram(name).unwrap();
            assert_eq!(
                enumerate_tricolorings(&d),
                enumerate_colorings(&d, &g, &s).unwrap(),
                "{name}"
            );
        }
    }

    #[test]
    fn classes() {
        let (g, s) = sigma();
        let d = builtin_diagram("trefoil_right").unwrap();
        let all = enumerate_colorings(&d, &g, &s).unwrap();
        let cls = conjugation_classes(&all, &g);
        assert_eq!(cls.len(), 2);
        let u = enumerate_colorings(&LinkDiagram::unknot(), &g, &s).unwrap();
        assert_eq!(conjugation_classes(&u, &g).len(), 1);
        assert!(conjugation_classes(&[], &g).is_empty());
    }

    #[test]
    fn block_parsing() {
        let text = "kld 1\nX 1 4 2 5\nX 3 6 4 1\nX 5 2 6 3\nC 1 R\nC 3 G\nC 5 B\n";
        let (d, block) = parse_kld(text).unwrap();
        let (_, _, psi) = coloring_from_block(&d, &block).unwrap().unwrap();
        assert!(!psi.is_constant());
        let bad = "kld 1\nX 1 4 2 5\nX 3 6 4 1\nX 5 2 6 3\nC 1 R\nC 3 R\nC 5 B\n";
        let (d, block) = parse_kld(bad).unwrap();
        assert!(coloring_from_block(&d, &block).is_err());
        let missing = "kld 1\nU 1\nG sigma3\n";
        let (d, block) = parse_kld(missing).unwrap();
        assert!(matches!(coloring_from_block(&d, &block), Err(Error::Coloring(_))));
    }

    #[test]
    fn mirror_transport_is_valid() {
        let (g, s) = sigma();
        for name in crate::catalog::CATALOG {
            let d = builtin_diagram(name).unwrap();
            let m = d.mirror();
            for psi in enumerate_tricolorings(&d) {
                let t = mirror_tricoloring(&d, &psi).unwrap();
                validate_coloring(&m, &g, Some(&s), &t).unwrap();
                assert_eq!(t.is_constant(), psi.is_constant());
            }
        }
    }
}
