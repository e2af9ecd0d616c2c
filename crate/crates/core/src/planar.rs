//! Mutable edge/crossing graph used while a move rewires a diagram.
//!
//! Edges are addressed by stable ids and carry an ordering key, so that
//! turning the graph back into a `LinkDiagram` renumbers arcs predictably:
//! components are ordered by their smallest key and numbered from that edge.

use crate::diagram::LinkDiagram;
use crate::error::{Error, Result};
use crate::group::{Elem, FiniteGroup};

pub(crate) type End = Option<(usize, usize)>;

#[derive(Clone, Debug)]
pub(crate) struct WEdge {
    pub tail: End,
    pub head: End,
    pub color: Elem,
    pub key: u64,
    pub alive: bool,
}

#[derive(Clone, Debug)]
pub(crate) struct WCross {
    pub edges: [usize; 4],
    /// 0 when slots 0/2 carry the under-strand, 1 for slots 1/3.
    pub under_axis: usize,
    pub key: u64,
    pub alive: bool,
}

#[derive(Clone, Debug)]
pub(crate) struct Work<'g> {
    pub g: &'g FiniteGroup,
    pub edges: Vec<WEdge>,
    pub cross: Vec<WCross>,
    next_edge_key: u64,
    next_cross_key: u64,
}

impl<'g> Work<'g> {
    pub fn from_diagram(d: &LinkDiagram, colors: &[Elem], g: &'g FiniteGroup) -> Self {
        let ends = d.ends();
        let edges = (0..d.num_arcs() as usize)
            .map(|i| WEdge {
                tail: ends[i].map(|e| e[0]),
                head: ends[i].map(|e| e[1]),
                color: colors[i],
                key: i as u64 + 1,
                alive: true,
            })
            .collect();
        let cross = d
            .crossings()
            .iter()
            .enumerate()
            .map(|(i, c)| WCross {
                edges: c.slots.map(|a| a as usize - 1),
                under_axis: 0,
                key: i as u64,
                alive: true,
            })
            .collect();
        Work {
            g,
            edges,
            cross,
            next_edge_key: d.num_arcs() as u64 + 1,
            next_cross_key: d.num_crossings() as u64,
        }
    }

    pub fn empty(g: &'g FiniteGroup) -> Self {
        Work {
            g,
            edges: vec![],
            cross: vec![],
            next_edge_key: 1,
            next_cross_key: 0,
        }
    }

    pub fn new_edge(&mut self, color: Elem) -> usize {
        self.edges.push(WEdge {
            tail: None,
            head: None,
            color,
            key: self.next_edge_key,
            alive: true,
        });
        self.next_edge_key += 1;
        self.edges.len() - 1
    }

    /// A crossing with all slots unset; callers attach edges afterwards.
    pub fn new_cross(&mut self, under_axis: usize) -> usize {
        self.cross.push(WCross {
            edges: [usize::MAX; 4],
            under_axis,
            key: self.next_cross_key,
            alive: true,
        });
        self.next_cross_key += 1;
        self.cross.len() - 1
    }

    pub fn is_loop(&self, e: usize) -> bool {
        self.edges[e].tail.is_none()
    }

    /// Cuts `e` at `n` new passages. Returns `(incoming, outgoing)` piece per
    /// passage in orientation order; the caller attaches each passage. The
    /// first piece keeps the id, key and tail of `e`.
    pub fn subdivide(&mut self, e: usize, n: usize) -> Vec<(usize, usize)> {
        let color = self.edges[e].color;
        let looped = self.is_loop(e);
        let extra = if looped { n - 1 } else { n };
        let mut pieces = vec![e];
        for _ in 0..extra {
            pieces.push(self.new_edge(color));
        }
        if !looped {
            let head = self.edges[e].head;
            let last = *pieces.last().unwrap();
            self.edges[last].head = head;
            if let Some((x, s)) = head {
                self.cross[x].edges[s] = last;
            }
        }
        (0..n).map(|k| (pieces[k], pieces[(k + 1) % pieces.len()])).collect()
    }

    pub fn attach_head(&mut self, e: usize, x: usize, s: usize) {
        self.edges[e].head = Some((x, s));
        self.cross[x].edges[s] = e;
    }

    pub fn attach_tail(&mut self, e: usize, x: usize, s: usize) {
        self.edges[e].tail = Some((x, s));
        self.cross[x].edges[s] = e;
    }

    pub fn is_over_slot(&self, x: usize, s: usize) -> bool {
        s % 2 != self.cross[x].under_axis
    }

    pub fn sign(&self, x: usize) -> i8 {
        let c = &self.cross[x];
        let u = c.under_axis;
        let s0 = if self.edges[c.edges[u]].head == Some((x, u)) {
            u
        } else {
            u + 2
        };
        let o = (u + 1) % 2;
        let over_in = if self.edges[c.edges[o]].head == Some((x, o)) {
            o
        } else {
            o + 2
        };
        if over_in == (s0 + 3) % 4 {
            1
        } else {
            -1
        }
    }

    /// Color leaving crossing `x` along the strand that enters at slot `s`.
    pub fn pass(&self, x: usize, s: usize, c: Elem) -> Elem {
        if self.is_over_slot(x, s) {
            return c;
        }
        let o = self.edges[self.cross[x].edges[(s + 1) % 4]].color;
        if self.sign(x) > 0 {
            self.g.conj(o, c)
        } else {
            self.g.conj(self.g.inv(o), c)
        }
    }

    /// Recomputes colors along an oriented run of pieces from the first
    /// piece's color. The last piece's color is already fixed and is checked.
    pub fn propagate(&mut self, run: &[usize]) -> Result<()> {
        let n = run.len();
        for (k, w) in run.windows(2).enumerate() {
            let (x, s) = self.edges[w[0]].head.expect("run piece ends at a crossing");
            let c = self.pass(x, s, self.edges[w[0]].color);
            if k + 2 == n {
                if c != self.edges[w[1]].color {
                    return Err(Error::ColorMismatch(
                        "coloring does not extend across the new crossings".into(),
                    ));
                }
            } else {
                self.edges[w[1]].color = c;
            }
        }
        Ok(())
    }

    pub fn flip(&mut self, e: usize) {
        let ed = &mut self.edges[e];
        std::mem::swap(&mut ed.tail, &mut ed.head);
        ed.color = self.g.inv(ed.color);
    }

    /// Deletes crossing `x`, joining the two strands through it.
    pub fn remove_cross(&mut self, x: usize) {
        let u = self.cross[x].under_axis;
        for base in [u, (u + 1) % 2] {
            let (a, b) = (self.cross[x].edges[base], self.cross[x].edges[base + 2]);
            let (inn, out) = if self.edges[a].head == Some((x, base)) {
                (a, b)
            } else {
                (b, a)
            };
            self.join(inn, out);
        }
        self.cross[x].alive = false;
    }

    fn join(&mut self, inn: usize, out: usize) {
        if inn == out {
            self.edges[inn].tail = None;
            self.edges[inn].head = None;
            return;
        }
        let head = self.edges[out].head;
        self.edges[inn].head = head;
        if let Some((z, t)) = head {
            self.cross[z].edges[t] = inn;
        }
        self.edges[inn].key = self.edges[inn].key.min(self.edges[out].key);
        self.edges[out].alive = false;
    }

    /// Drops the given crossings together with every edge touching them.
    pub fn remove_crossings(&mut self, xs: &[usize]) {
        for &x in xs {
            self.cross[x].alive = false;
            for e in self.cross[x].edges {
                self.edges[e].alive = false;
            }
        }
    }

    pub fn kill_edge(&mut self, e: usize) {
        self.edges[e].alive = false;
    }

    /// Walks forward from `start`, flipping edges that run against the walk.
    pub fn reorient_from(&mut self, start: usize) {
        let mut e = start;
        loop {
            let Some((x, s)) = self.edges[e].head else { return };
            let t = (s + 2) % 4;
            let f = self.cross[x].edges[t];
            if self.edges[f].tail != Some((x, t)) {
                self.flip(f);
            }
            if f == start {
                return;
            }
            e = f;
        }
    }

    /// Edge ids of the component through `e`, in orientation order from `e`.
    pub fn component(&self, e: usize) -> Vec<usize> {
        let mut out = vec![e];
        let mut cur = e;
        while let Some((x, s)) = self.edges[cur].head {
            cur = self.cross[x].edges[(s + 2) % 4];
            if cur == e {
                break;
            }
            out.push(cur);
        }
        out
    }

    /// Converts back to a diagram plus per-arc colors, reversing components
    /// whose orientation the arc numbering alone cannot express.
    pub fn finish(self) -> Result<(LinkDiagram, Vec<Elem>)> {
        self.finish_tracked().map(|(d, c, _)| (d, c))
    }

    /// Like `finish`, also returning the new label of every edge id (0 for
    /// removed edges).
    pub fn finish_tracked(mut self) -> Result<(LinkDiagram, Vec<Elem>, Vec<u32>)> {
        for _ in 0..=self.cross.len() {
            let (slots, signs, loops, colors, comps, label) = self.label();
            let d = LinkDiagram::from_pd(slots, loops)?;
            let bad = d.crossings().iter().zip(&signs).position(|(c, &s)| c.sign != s);
            match bad {
                None => return Ok((d, colors, label)),
                Some(i) => {
                    let over_arc = d.crossings()[i].slots[1];
                    let comp = &comps[d.component_of(over_arc)];
                    for &e in comp {
                        self.flip(e);
                    }
                }
            }
        }
        Err(Error::Validation("orientation normalization did not settle".into()))
    }

    #[allow(clippy::type_complexity)]
    fn label(&self) -> (Vec<[u32; 4]>, Vec<i8>, Vec<u32>, Vec<Elem>, Vec<Vec<usize>>, Vec<u32>) {
        let mut order: Vec<usize> = (0..self.edges.len()).filter(|&e| self.edges[e].alive).collect();
        order.sort_by_key(|&e| self.edges[e].key);
        let mut label = vec![0u32; self.edges.len()];
        let mut comps = Vec::new();
        let mut colors = Vec::new();
        let mut loops = Vec::new();
        let mut next = 1u32;
        for &e in &order {
            if label[e] != 0 {
                continue;
            }
            let comp = self.component(e);
            if self.is_loop(e) {
                loops.push(next);
            }
            for &f in &comp {
                label[f] = next;
                colors.push(self.edges[f].color);
                next += 1;
            }
            comps.push(comp);
        }
        let mut xs: Vec<usize> = (0..self.cross.len()).filter(|&x| self.cross[x].alive).collect();
        xs.sort_by_key(|&x| self.cross[x].key);
        let mut slots = Vec::with_capacity(xs.len());
        let mut signs = Vec::with_capacity(xs.len());
        for &x in &xs {
            let c = &self.cross[x];
            let u = c.under_axis;
            let s0 = if self.edges[c.edges[u]].head == Some((x, u)) {
                u
            } else {
                u + 2
            };
            slots.push(std::array::from_fn(|k| label[c.edges[(s0 + k) % 4]]));
            signs.push(self.sign(x));
        }
        (slots, signs, loops, colors, comps, label)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_kld;
    use crate::group::builtin_sigma3;

    #[test]
    fn round_trip_is_identity() {
        let (g, _) = builtin_sigma3();
        let (d, _) = parse_kld("kld 1\nX 1 4 2 5\nX 3 6 4 1\nX 5 2 6 3\n").unwrap();
        let colors = vec![1, 1, 2, 2, 3, 3];
        let (d2, c2) = Work::from_diagram(&d, &colors, &g).finish().unwrap();
        assert_eq!(d, d2);
        assert_eq!(colors, c2);
    }

    #[test]
    fn removing_both_crossings_of_a_clasp_gives_loops() {
        let (g, _) = builtin_sigma3();
        // Hopf link
        let (d, _) = parse_kld("kld 1\nX 4 1 3 2\nX 2 3 1 4\n").unwrap();
        let mut w = Work::from_diagram(&d, &[1, 1, 1, 1], &g);
        w.remove_cross(0);
        w.remove_cross(1);
        let (d2, _) = w.finish().unwrap();
        assert_eq!(d2.loops(), &[1, 2]);
    }
}
