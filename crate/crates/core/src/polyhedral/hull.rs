//! Incremental 3-D convex hull on exact orientation predicates.
//!
//! Points are first sorted lexicographically; the initial simplex uses the
//! lexicographically first affinely independent points, and among the
//! points a face can see the farthest is inserted next, ties going to the
//! lexicographically smaller point.

use std::collections::{HashMap, VecDeque};

use robust::{orient2d, orient3d, Coord, Coord3D};

use crate::error::{Error, Result};

type P3 = [f64; 3];

fn c3(p: &P3) -> Coord3D<f64> {
    Coord3D { x: p[0], y: p[1], z: p[2] }
}

/// Positive when `d` lies below the plane of `(a, b, c)`, i.e. on the side
/// from which `a, b, c` appear clockwise.
fn orient(a: &P3, b: &P3, c: &P3, d: &P3) -> f64 {
    orient3d(c3(a), c3(b), c3(c), c3(d))
}

fn collinear(a: &P3, b: &P3, c: &P3) -> bool {
    let proj = |i: usize, j: usize| {
        orient2d(Coord { x: a[i], y: a[j] }, Coord { x: b[i], y: b[j] }, Coord { x: c[i], y: c[j] })
    };
    proj(0, 1) == 0.0 && proj(1, 2) == 0.0 && proj(0, 2) == 0.0
}

struct Face {
    v: [usize; 3],
    alive: bool,
    conflicts: Vec<usize>,
}

struct Builder<'a> {
    pts: &'a [P3],
    faces: Vec<Face>,
    edges: HashMap<(usize, usize), usize>,
    queue: VecDeque<usize>,
}

impl<'a> Builder<'a> {
    fn sees(&self, f: usize, p: usize) -> bool {
        let [a, b, c] = self.faces[f].v;
        orient(&self.pts[a], &self.pts[b], &self.pts[c], &self.pts[p]) < 0.0
    }

    fn add_face(&mut self, v: [usize; 3]) -> usize {
        let id = self.faces.len();
        for k in 0..3 {
            self.edges.insert((v[k], v[(k + 1) % 3]), id);
        }
        self.faces.push(Face { v, alive: true, conflicts: Vec::new() });
        self.queue.push_back(id);
        id
    }

    fn assign(&mut self, p: usize, candidates: &[usize]) {
        if let Some(&f) = candidates.iter().find(|&&f| self.sees(f, p)) {
            self.faces[f].conflicts.push(p);
        }
    }

    fn insert(&mut self, start: usize, eye: usize) -> Result<()> {
        let mut visible = vec![start];
        let mut mark = HashMap::from([(start, true)]);
        let mut horizon = Vec::new();
        let mut k = 0;
        while k < visible.len() {
            let f = visible[k];
            k += 1;
            let v = self.faces[f].v;
            for e in 0..3 {
                let (a, b) = (v[e], v[(e + 1) % 3]);
                let g = *self.edges.get(&(b, a)).ok_or_else(|| Error::Numerical("hull lost edge adjacency".into()))?;
                match mark.get(&g) {
                    Some(true) => {}
                    Some(false) => horizon.push((a, b)),
                    None => {
                        let vis = self.sees(g, eye);
                        mark.insert(g, vis);
                        if vis {
                            visible.push(g);
                        } else {
                            horizon.push((a, b));
                        }
                    }
                }
            }
        }
        let mut orphans = Vec::new();
        for &f in &visible {
            self.faces[f].alive = false;
            let v = self.faces[f].v;
            for e in 0..3 {
                self.edges.remove(&(v[e], v[(e + 1) % 3]));
            }
            orphans.append(&mut self.faces[f].conflicts);
        }
        let new_faces: Vec<usize> = horizon.iter().map(|&(a, b)| self.add_face([a, b, eye])).collect();
        orphans.sort_unstable();
        for p in orphans.into_iter().filter(|&p| p != eye) {
            self.assign(p, &new_faces);
        }
        Ok(())
    }
}

/// Convex hull of `points`. Returns the hull vertices (in lexicographic
/// order) and outward-oriented triangles indexing them. Points on the
/// hull boundary that are not extreme may be dropped.
pub fn convex_hull(points: &[P3]) -> Result<(Vec<P3>, Vec<[usize; 3]>)> {
    if points.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::Mesh("non-finite input coordinate".into()));
    }
    let mut pts: Vec<P3> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])).then(a[2].total_cmp(&b[2])));
    pts.dedup();
    if pts.len() < 4 {
        return Err(Error::Mesh(format!("need at least 4 distinct points, got {}", pts.len())));
    }
    let i2 = (2..pts.len())
        .find(|&k| !collinear(&pts[0], &pts[1], &pts[k]))
        .ok_or_else(|| Error::Mesh("input points are collinear".into()))?;
    let i3 = (2..pts.len())
        .find(|&k| k != i2 && orient(&pts[0], &pts[1], &pts[i2], &pts[k]) != 0.0)
        .ok_or_else(|| Error::Mesh("input points are coplanar".into()))?;

    let mut b = Builder { pts: &pts, faces: Vec::new(), edges: HashMap::new(), queue: VecDeque::new() };
    let simplex = [0, 1, i2, i3];
    for skip in (0..4).rev() {
        let mut tri: Vec<usize> = (0..4).filter(|&k| k != skip).map(|k| simplex[k]).collect();
        let opp = simplex[skip];
        if orient(&pts[tri[0]], &pts[tri[1]], &pts[tri[2]], &pts[opp]) < 0.0 {
            tri.swap(1, 2);
        }
        b.add_face([tri[0], tri[1], tri[2]]);
    }
    let initial: Vec<usize> = (0..4).collect();
    for p in 0..pts.len() {
        if !simplex.contains(&p) {
            b.assign(p, &initial);
        }
    }
    while let Some(f) = b.queue.pop_front() {
        if !b.faces[f].alive || b.faces[f].conflicts.is_empty() {
            continue;
        }
        let [x, y, z] = b.faces[f].v;
        let mut eye = None;
        let mut best = 0.0;
        for &p in &b.faces[f].conflicts {
            let h = -orient(&pts[x], &pts[y], &pts[z], &pts[p]);
            if h > best || (h == best && eye.is_some_and(|e| p < e)) {
                best = h;
                eye = Some(p);
            }
        }
        let eye = eye.expect("conflict points see their face");
        b.insert(f, eye)?;
    }

    let alive: Vec<[usize; 3]> = b.faces.iter().filter(|f| f.alive).map(|f| f.v).collect();
    let mut remap = vec![usize::MAX; pts.len()];
    let mut used: Vec<usize> = alive.iter().flatten().copied().collect();
    used.sort_unstable();
    used.dedup();
    for (new, &old) in used.iter().enumerate() {
        remap[old] = new;
    }
    Ok((used.iter().map(|&i| pts[i]).collect(), alive.iter().map(|t| t.map(|i| remap[i])).collect()))
}
