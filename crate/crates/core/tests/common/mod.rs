//! Independent oracles shared by the integration suites and the acceptance
//! harness. Nothing here calls into the library's algorithms.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet, VecDeque};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Inverse of `a` mod `m` by the iterative extended Euclid recurrence.
pub fn inverse_oracle(a: i128, m: i128) -> Option<i128> {
    let (mut r0, mut r1) = (a.rem_euclid(m), m);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    (r0 == 1).then(|| s0.rem_euclid(m))
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn det_i128(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a = m.to_vec();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let Some(r) = (k + 1..n).find(|&r| a[r][k] != 0) else {
                return 0;
            };
            a.swap(k, r);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Invariant factors from determinantal divisors: `dₖ = Δₖ / Δₖ₋₁` where
/// `Δₖ` is the gcd of all k×k minors. Exponential; small matrices only.
pub fn invariant_factors_oracle(a: &[Vec<i64>]) -> Vec<i128> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    let mut prev = 1i128;
    for k in 1..=rows.min(cols) {
        let mut g = 0i128;
        for rs in subsets(rows, k) {
            for cs in subsets(cols, k) {
                let minor: Vec<Vec<i128>> = rs
                    .iter()
                    .map(|&r| cs.iter().map(|&c| a[r][c] as i128).collect())
                    .collect();
                g = gcd_i128(g, det_i128(&minor));
            }
        }
        if g == 0 {
            break;
        }
        out.push(g / prev);
        prev = g;
    }
    out
}

pub fn random_matrix(rng: &mut StdRng, rows: usize, cols: usize, bound: i64) -> Vec<Vec<i64>> {
    (0..rows)
        .map(|_| (0..cols).map(|_| rng.gen_range(-bound..=bound)).collect())
        .collect()
}

/// A random unimodular matrix as a product of elementary operations.
pub fn random_unimodular(rng: &mut StdRng, n: usize, steps: usize) -> Vec<Vec<i64>> {
    let mut m: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect();
    if n < 2 {
        if n == 1 && rng.gen_bool(0.5) {
            m[0][0] = -1;
        }
        return m;
    }
    for _ in 0..steps {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n);
        while j == i {
            j = rng.gen_range(0..n);
        }
        match rng.gen_range(0..3) {
            0 => m.swap(i, j),
            1 => {
                for c in 0..n {
                    m[i][c] = -m[i][c];
                }
            }
            _ => {
                let k = rng.gen_range(-2..=2);
                for c in 0..n {
                    m[i][c] += k * m[j][c];
                }
            }
        }
    }
    m
}

/// Surjectivity of `ℤ^r → ⊕ ℤ_{mᵢ}`, `e_r ↦ (images[r][i] mod mᵢ)`, by
/// closing the generator images under addition.
pub fn surjective_oracle(images: &[Vec<i64>], moduli: &[i64]) -> bool {
    let total: i64 = moduli.iter().product();
    let start: Vec<i64> = vec![0; moduli.len()];
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        for g in images {
            let y: Vec<i64> = x
                .iter()
                .zip(g)
                .zip(moduli)
                .map(|((a, b), m)| (a + b).rem_euclid(*m))
                .collect();
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    seen.len() as i64 == total
}

pub type Perm = Vec<usize>;

pub fn cycles(n: usize, cs: &[&[usize]]) -> Perm {
    let mut p: Perm = (0..n).collect();
    for c in cs {
        for i in 0..c.len() {
            p[c[i]] = c[(i + 1) % c.len()];
        }
    }
    p
}

/// `a` then `b`.
pub fn compose(a: &Perm, b: &Perm) -> Perm {
    a.iter().map(|&x| b[x]).collect()
}

pub fn invert(a: &Perm) -> Perm {
    let mut out = vec![0; a.len()];
    for (i, &x) in a.iter().enumerate() {
        out[x] = i;
    }
    out
}

/// Image of a word in signed 1-based letters, read left to right.
pub fn eval_word(word: &[i32], gens: &[Perm]) -> Perm {
    let n = gens[0].len();
    let mut acc: Perm = (0..n).collect();
    for &l in word {
        let g = &gens[(l.unsigned_abs() - 1) as usize];
        acc = if l > 0 {
            compose(&acc, g)
        } else {
            compose(&acc, &invert(g))
        };
    }
    acc
}

/// Order of the permutation group generated by `gens`.
pub fn closure_order(gens: &[Perm]) -> usize {
    let n = gens.first().map_or(0, Vec::len);
    let id: Perm = (0..n).collect();
    let mut seen = BTreeSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = compose(&x, g);
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    seen.len()
}

/// Regular representation of the quaternion group on `±1, ±i, ±j, ±k`,
/// indexed `sign·4 + unit` with units `1, i, j, k`.
pub fn quaternion_generators() -> (Perm, Perm) {
    // unit products: (sign, unit) of u·v
    let table = [
        [(0, 0), (0, 1), (0, 2), (0, 3)],
        [(0, 1), (1, 0), (0, 3), (1, 2)],
        [(0, 2), (1, 3), (1, 0), (0, 1)],
        [(0, 3), (0, 2), (1, 1), (1, 0)],
    ];
    // right multiplication by a fixed element
    let right = |u: usize| -> Perm {
        (0..8)
            .map(|x| {
                let (s, v) = (x / 4, x % 4);
                let (s2, w) = table[v][u];
                ((s + s2) % 2) * 4 + w
            })
            .collect()
    };
    (right(1), right(2))
}

/// A small group: presentation text, permutation images of its
/// generators, and its order.
pub struct SmallGroup {
    pub name: &'static str,
    pub gens: &'static [&'static str],
    pub rels: &'static str,
    pub perms: Vec<Perm>,
}

pub fn small_groups() -> Vec<SmallGroup> {
    let (qi, qj) = quaternion_generators();
    vec![
        SmallGroup {
            name: "Z2xZ2",
            gens: &["x", "y"],
            rels: "x^2, y^2, (x y)^2",
            perms: vec![cycles(4, &[&[0, 1]]), cycles(4, &[&[2, 3]])],
        },
        SmallGroup {
            name: "S3",
            gens: &["a", "b"],
            rels: "a^2, b^3, (a b)^2",
            perms: vec![cycles(3, &[&[0, 1]]), cycles(3, &[&[0, 1, 2]])],
        },
        SmallGroup {
            name: "Q8",
            gens: &["i", "j"],
            rels: "i^4, i^2 j^-2, j^-1 i j i",
            perms: vec![qi, qj],
        },
        SmallGroup {
            name: "A4",
            gens: &["a", "b"],
            rels: "a^2, b^3, (a b)^3",
            perms: vec![cycles(4, &[&[0, 1], &[2, 3]]), cycles(4, &[&[0, 1, 2]])],
        },
        SmallGroup {
            name: "S4",
            gens: &["a", "b"],
            rels: "a^2, b^4, (a b)^3",
            perms: vec![cycles(4, &[&[0, 1]]), cycles(4, &[&[0, 1, 2, 3]])],
        },
        SmallGroup {
            name: "A5",
            gens: &["a", "b"],
            rels: "a^2, b^3, (a b)^5",
            perms: vec![cycles(5, &[&[0, 1], &[2, 3]]), cycles(5, &[&[0, 2, 4]])],
        },
    ]
}

/// Local invariants by the assignment recipe, in machine integers:
/// `(m, j₁ mod m, j₂ mod m)` for a point `(d, e₁, e₂)` on a surface `(n, j)`.
pub fn local_triple_oracle(n: i128, j: i128, d: i128, e1: i128, e2: i128) -> (i128, i128, i128) {
    let rad = |mut v: i128| {
        let mut r = 1;
        let mut p = 2;
        while p * p <= v {
            if v % p == 0 {
                r *= p;
                while v % p == 0 {
                    v /= p;
                }
            }
            p += 1;
        }
        if v > 1 {
            r *= v;
        }
        r
    };
    let e = (e1 * inverse_oracle(e2, d).expect("e2 invertible mod d")).rem_euclid(d);
    let (rd, rj) = (rad(d), rad(j.abs().max(1)));
    let x = rd / gcd_i128(rd, rj);
    let j2 = j + n * x;
    let j1 = n * e * j2;
    let m = n * d;
    (m, j1.rem_euclid(m), j2.rem_euclid(m))
}
