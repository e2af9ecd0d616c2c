//! Brute-force oracles shared by the integration tests. Nothing here calls
//! the reduction engine or the coloring search.
#![allow(dead_code)]

use linkforge::coloring::{Color, GColoring};
use linkforge::diagram::LinkDiagram;
use linkforge::group::{builtin_sigma3, Elem, FiniteGroup, StabilizerSet};
use linkforge::moves::{applicable_moves, apply_move, MoveEvent};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Colorings by plain enumeration of every assignment from `s`. Only valid
/// when every member of `s` is an involution, where both crossing signs give
/// `under_out = over * under_in * over`.
pub fn brute_colorings(d: &LinkDiagram, g: &FiniteGroup, s: &StabilizerSet) -> usize {
    let members: Vec<Elem> = s.members().collect();
    assert!(members.iter().all(|&m| g.mul(m, m) == g.identity()));
    let n = d.num_arcs() as usize;
    let mut idx = vec![0usize; n];
    let mut count = 0;
    loop {
        let col = |a: u32| members[idx[a as usize - 1]];
        if d.crossings().iter().all(|c| {
            let o = col(c.over_in());
            col(c.over_out()) == o && col(c.under_out()) == g.mul(g.mul(o, col(c.under_in())), o)
        }) {
            count += 1;
        }
        let mut k = 0;
        loop {
            if k == n {
                return count;
            }
            idx[k] += 1;
            if idx[k] < members.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Fox p-colorings: labels in Z_p with 2 * over = under_in + under_out.
pub fn fox_colorings(d: &LinkDiagram, p: u32) -> usize {
    let n = d.num_arcs() as usize;
    let mut lab = vec![0u32; n];
    let mut count = 0;
    loop {
        let v = |a: u32| lab[a as usize - 1];
        if d.crossings().iter().all(|c| {
            v(c.over_in()) == v(c.over_out()) && (2 * v(c.over_in())) % p == (v(c.under_in()) + v(c.under_out())) % p
        }) {
            count += 1;
        }
        let mut k = 0;
        loop {
            if k == n {
                return count;
            }
            lab[k] += 1;
            if lab[k] < p {
                break;
            }
            lab[k] = 0;
            k += 1;
        }
    }
}

fn z3(psi: &GColoring, a: u32) -> i64 {
    Color::from_element(psi.get(a)).expect("tricoloring").z3() as i64
}

/// Mochizuki's 3-cocycle on Z_3.
fn theta(x: i64, y: i64, z: i64) -> i64 {
    let b = (2 * z - y).pow(3) + y.pow(3) - 2 * z.pow(3);
    ((x - y) * (b / 3)).rem_euclid(3)
}

/// Shadow state sum of the Mochizuki cocycle. Region colors change by
/// `x -> 2a - x` across an arc colored `a`; each crossing contributes
/// `sign * theta(x, under_out, over)` with `x` read at corner 1 for positive
/// crossings and corner 2 for negative ones.
pub fn cocycle_i(d: &LinkDiagram, psi: &GColoring) -> u8 {
    let faces = d.faces();
    let mut face_of = vec![[0usize; 4]; d.num_crossings()];
    for (f, face) in faces.iter().enumerate() {
        for &(x, s) in face {
            face_of[x][s] = f;
        }
    }
    let mut fc: Vec<Option<i64>> = vec![None; faces.len()];
    for start in 0..faces.len() {
        if fc[start].is_some() {
            continue;
        }
        fc[start] = Some(0);
        let mut stack = vec![start];
        while let Some(f) = stack.pop() {
            let c = fc[f].unwrap();
            for &(x, s) in &faces[f] {
                let a = d.crossings()[x].slots[s];
                let g = face_of[x][(s + 3) % 4];
                let nc = (2 * z3(psi, a) - c).rem_euclid(3);
                match fc[g] {
                    None => {
                        fc[g] = Some(nc);
                        stack.push(g);
                    }
                    Some(v) => assert_eq!(v, nc, "region coloring is inconsistent"),
                }
            }
        }
    }
    let mut sum = 0i64;
    for (x, c) in d.crossings().iter().enumerate() {
        let corner = if c.sign > 0 { 1 } else { 2 };
        let r = fc[face_of[x][corner]].unwrap();
        sum += c.sign as i64 * theta(r, z3(psi, c.under_out()), z3(psi, c.over_in()));
    }
    sum.rem_euclid(3) as u8
}

pub fn sigma3() -> FiniteGroup {
    builtin_sigma3().0
}

/// Applies up to `n` random applicable moves, staying at or below
/// `max_crossings`. Returns the final state and the moves taken.
pub fn random_walk(
    d: &LinkDiagram,
    psi: &GColoring,
    n: usize,
    max_crossings: usize,
    rng: &mut ChaCha8Rng,
) -> (LinkDiagram, GColoring, Vec<MoveEvent>) {
    let g = sigma3();
    let mut cur = (d.clone(), psi.clone());
    let mut taken = vec![];
    for _ in 0..n {
        let opts: Vec<_> = applicable_moves(&cur.0, &g, &cur.1)
            .into_iter()
            .filter(|m| !matches!(m, MoveEvent::R2Add { .. }) || cur.0.num_crossings() + 2 <= max_crossings)
            .filter(|m| !matches!(m, MoveEvent::R1Add { .. }) || cur.0.num_crossings() < max_crossings)
            .collect();
        let Some(m) = opts.choose(rng) else { break };
        cur = apply_move(&cur.0, &g, &cur.1, m).expect("listed move applies");
        taken.push(m.clone());
    }
    (cur.0, cur.1, taken)
}

/// Concatenated coloring for `a.untangled_union(b)`.
pub fn union_coloring(a: &GColoring, b: &GColoring) -> GColoring {
    GColoring::new(a.values.iter().chain(&b.values).copied().collect())
}
