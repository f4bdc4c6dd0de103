use super::{half, Cell, StratifiedComplex};
use crate::homalg::q;
use crate::Error;

pub const PRESETS: [&str; 6] = ["interval", "circle", "disc", "s2", "p1", "c-origin"];

fn cells(list: &[(&str, usize)]) -> Vec<Cell> {
    list.iter().map(|&(id, dim)| Cell { id: id.into(), dim }).collect()
}

fn inc(list: &[(&str, &str, i64)]) -> Vec<(String, String, i64)> {
    list.iter().map(|&(t, s, e)| (t.into(), s.into(), e)).collect()
}

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

/// One real stratum per cell.
fn cell_strata(cs: &[Cell]) -> Vec<(String, Vec<String>, crate::homalg::Q, bool)> {
    cs.iter().map(|c| (c.id.clone(), vec![c.id.clone()], half(c.dim), false)).collect()
}

/// Shipped example spaces, by name.
pub fn preset(name: &str) -> Result<StratifiedComplex, Error> {
    match name {
        "interval" => {
            let cs = cells(&[("a", 0), ("b", 0), ("e", 1)]);
            let st = cell_strata(&cs);
            StratifiedComplex::new(cs, inc(&[("e", "a", -1), ("e", "b", 1)]), st)
        }
        "circle" => {
            let cs = cells(&[("v0", 0), ("v1", 0), ("e0", 1), ("e1", 1)]);
            let st = cell_strata(&cs);
            let i = inc(&[("e0", "v0", -1), ("e0", "v1", 1), ("e1", "v1", -1), ("e1", "v0", 1)]);
            StratifiedComplex::new(cs, i, st)
        }
        "disc" => {
            let cs = cells(&[
                ("c", 0),
                ("v0", 0),
                ("v1", 0),
                ("r0", 1),
                ("r1", 1),
                ("b0", 1),
                ("b1", 1),
                ("f0", 2),
                ("f1", 2),
            ]);
            let i = inc(&[
                ("r0", "c", -1),
                ("r0", "v0", 1),
                ("r1", "c", -1),
                ("r1", "v1", 1),
                ("b0", "v0", -1),
                ("b0", "v1", 1),
                ("b1", "v1", -1),
                ("b1", "v0", 1),
                ("f0", "r0", 1),
                ("f0", "b0", 1),
                ("f0", "r1", -1),
                ("f1", "r1", 1),
                ("f1", "b1", 1),
                ("f1", "r0", -1),
            ]);
            let st = vec![
                ("center".into(), names(&["c"]), q(0), false),
                ("interior".into(), names(&["r0", "r1", "f0", "f1"]), q(1), false),
                ("boundary".into(), names(&["v0", "v1", "b0", "b1"]), half(1), false),
            ];
            StratifiedComplex::new(cs, i, st)
        }
        "s2" | "p1" => {
            let (n, s) = if name == "s2" { ("n", "s") } else { ("p0", "pinf") };
            let (m0, m1, u, l) =
                if name == "s2" { ("m0", "m1", "u", "l") } else { ("e0", "e1", "f+", "f-") };
            let cs = cells(&[(n, 0), (s, 0), (m0, 1), (m1, 1), (u, 2), (l, 2)]);
            let i = inc(&[
                (m0, n, -1),
                (m0, s, 1),
                (m1, n, -1),
                (m1, s, 1),
                (u, m0, 1),
                (u, m1, -1),
                (l, m1, 1),
                (l, m0, -1),
            ]);
            let st = if name == "s2" {
                vec![("S2".into(), names(&[n, s, m0, m1, u, l]), q(1), true)]
            } else {
                vec![
                    ("p0".into(), names(&[n]), q(0), true),
                    ("pinf".into(), names(&[s]), q(0), true),
                    ("C*".into(), names(&[m0, m1, u, l]), q(1), true),
                ]
            };
            StratifiedComplex::new(cs, i, st)
        }
        "c-origin" => {
            let cs = cells(&[("o", 0), ("r0", 1), ("r1", 1), ("f0", 2), ("f1", 2)]);
            let i = inc(&[
                ("r0", "o", -1),
                ("r1", "o", -1),
                ("f0", "r0", 1),
                ("f0", "r1", -1),
                ("f1", "r1", 1),
                ("f1", "r0", -1),
            ]);
            let st = vec![
                ("origin".into(), names(&["o"]), q(0), true),
                ("C*".into(), names(&["r0", "r1", "f0", "f1"]), q(1), true),
            ];
            StratifiedComplex::new(cs, i, st)
        }
        other => Err(Error::Invalid(format!("unknown preset {other:?}"))),
    }
}

/// The interval cut into `n` edges: vertices v0…vn, edge ek from vk to vk+1, one stratum per cell.
pub fn subdivided_interval(n: usize) -> Result<StratifiedComplex, Error> {
    if n == 0 {
        return Err(Error::Invalid("an interval needs at least one edge".into()));
    }
    path_graph(n + 1, n)
}

/// The circle cut into `n ≥ 2` edges, edge e{n−1} closing the loop at v0.
pub fn subdivided_circle(n: usize) -> Result<StratifiedComplex, Error> {
    if n < 2 {
        return Err(Error::Invalid("a circle needs at least two edges".into()));
    }
    path_graph(n, n)
}

fn path_graph(vertices: usize, edges: usize) -> Result<StratifiedComplex, Error> {
    let mut cs: Vec<Cell> = (0..vertices).map(|k| Cell { id: format!("v{k}"), dim: 0 }).collect();
    cs.extend((0..edges).map(|k| Cell { id: format!("e{k}"), dim: 1 }));
    let mut i = Vec::new();
    for k in 0..edges {
        i.push((format!("e{k}"), format!("v{k}"), -1));
        i.push((format!("e{k}"), format!("v{}", (k + 1) % vertices), 1));
    }
    let st = cell_strata(&cs);
    StratifiedComplex::new(cs, i, st)
}
