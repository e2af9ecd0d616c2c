//! Built-in diagrams.

use crate::coloring::{enumerate_tricolorings, GColoring};
use crate::diagram::{parse_kld, LinkDiagram};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::planar::Work;

pub const CATALOG: &[&str] = &[
    "unknot",
    "trefoil_right",
    "trefoil_left",
    "figure_eight",
    "hopf",
    "square_knot",
    "granny_knot",
    "torus_2_5",
    "fig5a_decay_example",
];

pub fn builtin_diagram(name: &str) -> Result<LinkDiagram> {
    match name {
        "unknot" => Ok(LinkDiagram::unknot()),
        "trefoil_right" => braid_closure(2, &[1, 1, 1]),
        "trefoil_left" => pd("X 1 4 2 5\nX 3 6 4 1\nX 5 2 6 3\n"),
        "figure_eight" => braid_closure(3, &[1, -2, 1, -2]),
        "hopf" => braid_closure(2, &[1, 1]),
        "square_knot" => braid_closure(3, &[1, 1, 1, -2, -2, -2]),
        "granny_knot" => braid_closure(3, &[-1, -1, -1, -2, -2, -2]),
        "torus_2_5" => braid_closure(2, &[1, 1, 1, 1, 1]),
        // stevedore knot 6_1: tricolorable, and a single band move unties it
        "fig5a_decay_example" => pd("X 1 4 2 5\nX 7 10 8 11\nX 3 9 4 8\nX 9 3 10 2\nX 5 12 6 1\nX 11 6 12 7\n"),
        _ => Err(Error::UnknownName(name.to_string())),
    }
}

fn pd(body: &str) -> Result<LinkDiagram> {
    Ok(parse_kld(&format!("kld 1\n{body}"))?.0)
}

/// Closure of a braid on `strands` strands. Generator `±i` crosses positions
/// `i-1` and `i`; for `+i` the strand coming from the left passes over.
pub fn braid_closure(strands: usize, word: &[i32]) -> Result<LinkDiagram> {
    if strands == 0 {
        return Err(Error::InvalidParameter("a braid needs at least one strand".into()));
    }
    let g = FiniteGroup::trivial();
    let mut w = Work::empty(&g);
    let bottom: Vec<usize> = (0..strands).map(|_| w.new_edge(0)).collect();
    let mut open = bottom.clone();
    for &gen in word {
        let i = gen.unsigned_abs() as usize;
        if gen == 0 || i >= strands {
            return Err(Error::InvalidParameter(format!("generator {gen} on {strands} strands")));
        }
        let (left, right) = (i - 1, i);
        // ccw from the lower right: SE, NE, NW, SW
        let x = w.new_cross(if gen > 0 { 0 } else { 1 });
        let ne = w.new_edge(0);
        let nw = w.new_edge(0);
        w.attach_head(open[right], x, 0);
        w.attach_tail(ne, x, 1);
        w.attach_tail(nw, x, 2);
        w.attach_head(open[left], x, 3);
        open[left] = nw;
        open[right] = ne;
    }
    for p in 0..strands {
        let (b, t) = (bottom[p], open[p]);
        if b == t {
            continue;
        }
        let tail = w.edges[t].tail.expect("top edge leaves a crossing");
        w.attach_tail(b, tail.0, tail.1);
        w.kill_edge(t);
    }
    Ok(w.finish()?.0)
}

/// Seeded random tricolored diagram with at most `crossings` crossings: the
/// closure of a random braid word, retried until it has a nonconstant
/// tricoloring (or given up on after a few tries, keeping a constant one).
pub fn random_instance(crossings: usize, seed: u64) -> Result<(LinkDiagram, GColoring)> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut last = None;
    for _ in 0..64 {
        let len = if crossings == 0 {
            0
        } else {
            rng.gen_range(1..=crossings)
        };
        let strands = rng.gen_range(2..=4usize).min(len + 1).max(1);
        let word: Vec<i32> = (0..len)
            .map(|_| {
                let g = rng.gen_range(1..strands.max(2)) as i32;
                if rng.gen_bool(0.5) {
                    g
                } else {
                    -g
                }
            })
            .collect();
        let d = braid_closure(strands, &word)?;
        let cols: Vec<GColoring> = enumerate_tricolorings(&d)
            .into_iter()
            .filter(|c| !c.is_constant())
            .collect();
        if !cols.is_empty() {
            let psi = cols[rng.gen_range(0..cols.len())].clone();
            return Ok((d, psi));
        }
        last = Some(d);
    }
    let d = last.unwrap_or_else(LinkDiagram::unknot);
    let psi = GColoring::constant(&d, crate::coloring::Color::R.element());
    Ok((d, psi))
}
