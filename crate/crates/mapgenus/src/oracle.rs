//! Brute-force enumeration of labeled maps: every perfect matching of the
//! half-edges around j cyclically ordered 2ν-valent vertices (plus optional
//! legs), with genus from Euler's formula and connectivity by union-find.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

pub const DEFAULT_CAP: usize = 24;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("{h} half-edges exceeds the cap of {cap}")]
    CapExceeded { h: usize, cap: usize },
    #[error("odd number of half-edges ({0})")]
    OddHalfEdges(usize),
    #[error("legs must be 0 or 2, got {0}")]
    BadLegs(usize),
    #[error("Euler characteristic gives non-integral or negative genus (V={v}, E={e}, F={f})")]
    OddEuler { v: usize, e: usize, f: usize },
    #[error("matching is not a fixed-point-free involution")]
    BadMatching,
    #[error("map is disconnected")]
    Disconnected,
    #[error("thread pool: {0}")]
    Pool(String),
}

/// Fixed rotation system: vertex i owns half-edges 2νi .. 2νi+2ν−1 in
/// counterclockwise order; leg half-edges follow, each alone on its vertex.
/// Arrays are fixed at 32 slots so indexing by `x & 31` needs no bounds check.
#[derive(Clone, Debug)]
struct Frame {
    h: usize,
    sigma: [u8; 32],
    vert: [u8; 32],
    nv: usize,
}

impl Frame {
    fn new(nu: usize, j: usize, legs: usize) -> Self {
        let deg = 2 * nu;
        let h = deg * j + legs;
        let (mut sigma, mut vert) = ([0u8; 32], [0u8; 32]);
        for v in 0..j {
            for p in 0..deg {
                sigma[(v * deg + p) & 31] = (v * deg + (p + 1) % deg) as u8;
                vert[(v * deg + p) & 31] = v as u8;
            }
        }
        for l in 0..legs {
            sigma[(deg * j + l) & 31] = (deg * j + l) as u8;
            vert[(deg * j + l) & 31] = (j + l) as u8;
        }
        Frame { h, sigma, vert, nv: j + legs }
    }

    /// Number of cycles of σ∘μ, and whether the map is connected.
    fn faces_connected(&self, mu: &[u8; 32]) -> (usize, bool) {
        let all: u32 = ((1u64 << self.h) - 1) as u32;
        let mut rem = all;
        let mut faces = 0;
        while rem != 0 {
            let start = rem.trailing_zeros() as u8;
            faces += 1;
            let mut x = start;
            loop {
                rem &= !(1u32 << x);
                x = self.sigma[(mu[(x & 31) as usize] & 31) as usize];
                if x == start {
                    break;
                }
            }
        }
        if self.nv == 1 {
            return (faces, true);
        }
        let mut adj = [0u32; 32];
        for a in 0..self.h {
            let (va, vb) = (self.vert[a & 31], self.vert[(mu[a & 31] & 31) as usize]);
            adj[(va & 31) as usize] |= 1 << vb;
        }
        let target: u32 = ((1u64 << self.nv) - 1) as u32;
        let mut reach: u32 = 1;
        loop {
            let mut next = reach;
            let mut bits = reach;
            while bits != 0 {
                next |= adj[(bits.trailing_zeros() & 31) as usize];
                bits &= bits - 1;
            }
            if next == reach {
                break;
            }
            reach = next;
        }
        (faces, reach == target)
    }
}

/// One labeled map: the rotation system is implied by (nu, j, legs).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapInstance {
    pub nu: usize,
    pub j: usize,
    pub legs: usize,
    pub matching: Vec<usize>,
}

fn genus_from(v: usize, e: usize, f: usize) -> Result<u32, OracleError> {
    let twice = 2 + e as i64 - v as i64 - f as i64;
    if twice < 0 || twice % 2 != 0 {
        return Err(OracleError::OddEuler { v, e, f });
    }
    Ok((twice / 2) as u32)
}

/// g = (2 − V + E − F)/2 for a connected map.
pub fn genus_of(map: &MapInstance) -> Result<u32, OracleError> {
    let frame = Frame::new(map.nu, map.j, map.legs);
    if map.matching.len() != frame.h {
        return Err(OracleError::BadMatching);
    }
    for (a, &b) in map.matching.iter().enumerate() {
        if b >= frame.h || b == a || map.matching[b] != a {
            return Err(OracleError::BadMatching);
        }
    }
    if frame.h > 31 {
        return Err(OracleError::CapExceeded { h: frame.h, cap: 31 });
    }
    let mut mu = [0u8; 32];
    for (a, &b) in map.matching.iter().enumerate() {
        mu[a] = b as u8;
    }
    let (f, conn) = frame.faces_connected(&mu);
    if !conn {
        return Err(OracleError::Disconnected);
    }
    genus_from(frame.nv, frame.h / 2, f)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GenusHistogram {
    pub counts: BTreeMap<u32, u64>,
    pub total_matchings: u64,
    pub connected: u64,
    pub half_edges: usize,
}

impl GenusHistogram {
    pub fn get(&self, g: u32) -> u64 {
        self.counts.get(&g).copied().unwrap_or(0)
    }

    fn merge(mut self, o: GenusHistogram) -> GenusHistogram {
        for (g, c) in o.counts {
            *self.counts.entry(g).or_insert(0) += c;
        }
        self.total_matchings += o.total_matchings;
        self.connected += o.connected;
        self
    }

    pub fn to_json(&self) -> String {
        let hist: BTreeMap<String, String> = self.counts.iter().map(|(g, c)| (g.to_string(), c.to_string())).collect();
        serde_json::json!({ "histogram": hist, "total_matchings": self.total_matchings.to_string() }).to_string()
    }
}

/// (n−1)!! for even n.
pub fn double_factorial_odd(n: usize) -> u64 {
    (1..n).step_by(2).map(|k| k as u64).product()
}

/// Depth-first walk over matchings. Faces of σ∘μ are tracked incrementally:
/// the partially defined permutation is a set of paths, `head`/`tail` map
/// each path end to its other end, and closing a path onto itself adds a
/// face. Components are tracked as vertex masks.
struct Walker<'a> {
    frame: &'a Frame,
    head: [u8; 32],
    tail: [u8; 32],
    faces: usize,
    comp: [u32; 32],
    max_genus: u32,
    hist: [u64; 16],
    total: u64,
    connected: u64,
}

impl<'a> Walker<'a> {
    fn new(frame: &'a Frame, max_genus: u32) -> Self {
        let mut w = Walker {
            frame,
            head: [0; 32],
            tail: [0; 32],
            faces: 0,
            comp: [0; 32],
            max_genus,
            hist: [0; 16],
            total: 0,
            connected: 0,
        };
        for x in 0..32u8 {
            w.head[x as usize] = x;
            w.tail[x as usize] = x;
        }
        for v in 0..frame.nv {
            w.comp[v] = 1 << v;
        }
        w
    }

    /// Adds the step x → y; returns the overwritten (tail[s], head[e]) slots.
    #[inline]
    fn link(&mut self, x: u8, y: u8) -> Option<(u8, u8, u8, u8)> {
        let s = self.head[(x & 31) as usize];
        if s == y {
            self.faces += 1;
            return None;
        }
        let e = self.tail[(y & 31) as usize];
        let saved = (s, self.tail[(s & 31) as usize], e, self.head[(e & 31) as usize]);
        self.tail[(s & 31) as usize] = e;
        self.head[(e & 31) as usize] = s;
        Some(saved)
    }

    #[inline]
    fn unlink(&mut self, saved: Option<(u8, u8, u8, u8)>) {
        match saved {
            None => self.faces -= 1,
            Some((s, ts, e, he)) => {
                self.head[(e & 31) as usize] = he;
                self.tail[(s & 31) as usize] = ts;
            }
        }
    }

    /// Fixes the pair (a, b), then walks the remaining free half-edges.
    fn run_from(&mut self, a: u8, b: u8, free: u32) {
        let f = self.frame;
        self.link(a, f.sigma[(b & 31) as usize]);
        self.link(b, f.sigma[(a & 31) as usize]);
        let (va, vb) = (f.vert[(a & 31) as usize] & 31, f.vert[(b & 31) as usize] & 31);
        let merged = self.comp[va as usize] | self.comp[vb as usize];
        for v in [va, vb] {
            self.comp[v as usize] = merged;
        }
        self.run(free);
    }

    fn run(&mut self, free: u32) {
        if free == 0 {
            self.total += 1;
            let target = ((1u64 << self.frame.nv) - 1) as u32;
            if self.comp[0] == target {
                self.connected += 1;
                let g = genus_from(self.frame.nv, self.frame.h / 2, self.faces).expect("Euler formula on a connected map");
                debug_assert!(g <= self.max_genus);
                self.hist[g as usize] += 1;
            }
            return;
        }
        let a = free.trailing_zeros() as u8;
        let rest = free & !(1 << a);
        let mut cand = rest;
        while cand != 0 {
            let b = cand.trailing_zeros() as u8;
            cand &= cand - 1;
            let f = self.frame;
            let s1 = self.link(a, f.sigma[(b & 31) as usize]);
            let s2 = self.link(b, f.sigma[(a & 31) as usize]);
            let (va, vb) = (f.vert[(a & 31) as usize] & 31, f.vert[(b & 31) as usize] & 31);
            if self.comp[va as usize] & (1 << vb) == 0 {
                let old = self.comp;
                let merged = self.comp[va as usize] | self.comp[vb as usize];
                let mut bits = merged;
                while bits != 0 {
                    self.comp[(bits.trailing_zeros() & 31) as usize] = merged;
                    bits &= bits - 1;
                }
                self.run(rest & !(1 << b));
                self.comp = old;
            } else {
                self.run(rest & !(1 << b));
            }
            self.unlink(s2);
            self.unlink(s1);
        }
    }
}

/// Per-genus counts of connected labeled maps, parallel over the partner of
/// half-edge 0 on the given number of threads (`None`: rayon's default).
pub fn enumerate_with(nu: usize, j: usize, legs: usize, cap: usize, threads: Option<usize>) -> Result<GenusHistogram, OracleError> {
    if legs != 0 && legs != 2 {
        return Err(OracleError::BadLegs(legs));
    }
    let frame = Frame::new(nu, j, legs);
    let h = frame.h;
    if h > cap.min(31) {
        return Err(OracleError::CapExceeded { h, cap });
    }
    if !h.is_multiple_of(2) {
        return Err(OracleError::OddHalfEdges(h));
    }
    let max_genus = ((h / 2 + 1).saturating_sub(frame.nv) / 2) as u32;
    let all: u32 = ((1u64 << h) - 1) as u32;
    let job = |b: usize| -> GenusHistogram {
        let mut w = Walker::new(&frame, max_genus);
        w.run_from(0, b as u8, all & !1 & !(1 << b));
        let mut out = GenusHistogram { total_matchings: w.total, connected: w.connected, half_edges: h, ..Default::default() };
        for (g, &c) in w.hist.iter().enumerate() {
            if c > 0 {
                out.counts.insert(g as u32, c);
            }
        }
        out
    };
    let run = || {
        (1..h)
            .into_par_iter()
            .map(job)
            .reduce(|| GenusHistogram { half_edges: h, ..Default::default() }, GenusHistogram::merge)
    };
    let hist = match threads {
        None => run(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| OracleError::Pool(e.to_string()))?
            .install(run),
    };
    assert_eq!(hist.total_matchings, double_factorial_odd(h), "every matching visited once");
    Ok(hist)
}

pub fn enumerate(nu: usize, j: usize, legs: usize) -> Result<GenusHistogram, OracleError> {
    enumerate_with(nu, j, legs, DEFAULT_CAP, None)
}

/// Face-length sanity: the σ∘μ cycles of any matching partition all
/// half-edges.
pub fn face_lengths(map: &MapInstance) -> Vec<usize> {
    let frame = Frame::new(map.nu, map.j, map.legs);
    let mut seen = vec![false; frame.h];
    let mut out = Vec::new();
    for s in 0..frame.h {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            len += 1;
            x = frame.sigma[map.matching[x]] as usize;
        }
        out.push(len);
    }
    out
}
