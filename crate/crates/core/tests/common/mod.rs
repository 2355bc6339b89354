//! Brute-force reference implementations on plain element lists.
//!
//! Nothing here calls into the library beyond converting sets, so these
//! serve as independent oracles for the optimized code paths.

#![allow(dead_code)]

use f2sumset::{GroupCtx, SetF2};

pub fn set(n: u32, elems: &[u32]) -> SetF2 {
    SetF2::from_elements(GroupCtx::new(n).unwrap(), elems.iter().copied()).unwrap()
}

pub fn from_mask(n: u32, mask: u64) -> SetF2 {
    SetF2::from_mask(GroupCtx::new(n).unwrap(), mask).unwrap()
}

pub fn elems(s: &SetF2) -> Vec<u32> {
    s.iter().map(|e| e.bits()).collect()
}

/// Membership vector of length `2^n`.
pub fn indicator(n: u32, xs: &[u32]) -> Vec<bool> {
    let mut v = vec![false; 1 << n];
    for &x in xs {
        v[x as usize] = true;
    }
    v
}

pub fn list(ind: &[bool]) -> Vec<u32> {
    (0..ind.len() as u32).filter(|&x| ind[x as usize]).collect()
}

pub fn sumset(n: u32, a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut ind = vec![false; 1 << n];
    for &x in a {
        for &y in b {
            ind[(x ^ y) as usize] = true;
        }
    }
    list(&ind)
}

pub fn nu(a: &[u32], b: &[u32], g: u32) -> u64 {
    a.iter()
        .flat_map(|&x| b.iter().map(move |&y| x ^ y))
        .filter(|&s| s == g)
        .count() as u64
}

pub fn mu(n: u32, a: &[u32], b: &[u32]) -> u64 {
    sumset(n, a, b)
        .into_iter()
        .map(|g| nu(a, b, g))
        .min()
        .unwrap_or(0)
}

/// Subgroup generated by `gens`, as a sorted list, by closing under XOR.
pub fn closure(n: u32, gens: &[u32]) -> Vec<u32> {
    let mut ind = vec![false; 1 << n];
    ind[0] = true;
    let mut members = vec![0u32];
    loop {
        let mut grew = false;
        for &g in gens {
            for i in 0..members.len() {
                let y = members[i] ^ g;
                if !ind[y as usize] {
                    ind[y as usize] = true;
                    members.push(y);
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }
    members.sort_unstable();
    members
}

/// `(rep, subgroup)` of the smallest coset containing the non-empty `a`.
pub fn affine_span(n: u32, a: &[u32]) -> (u32, Vec<u32>) {
    let a0 = a[0];
    let diffs: Vec<u32> = a.iter().map(|&x| x ^ a0).collect();
    let sub = closure(n, &diffs);
    let rep = sub.iter().map(|&h| h ^ a0).min().unwrap();
    (rep, sub)
}

pub fn spans(n: u32, a: &[u32]) -> bool {
    !a.is_empty() && affine_span(n, a).1.len() == 1 << n
}

pub fn period(n: u32, a: &[u32]) -> Vec<u32> {
    let ind = indicator(n, a);
    (0..1u32 << n)
        .filter(|&g| a.iter().all(|&x| ind[(x ^ g) as usize]))
        .collect()
}

/// All subgroups of order `2^d`, each as a sorted list.
pub fn subgroups_of_dim(n: u32, d: u32) -> Vec<Vec<u32>> {
    let mut out: Vec<Vec<u32>> = Vec::new();
    fn rec(n: u32, d: u32, start: u32, gens: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if gens.len() == d as usize {
            let s = closure(n, gens);
            if s.len() == 1 << d && !out.contains(&s) {
                out.push(s);
            }
            return;
        }
        for g in start..1u32 << n {
            gens.push(g);
            rec(n, d, g + 1, gens, out);
            gens.pop();
        }
    }
    if d <= n {
        rec(n, d, 1, &mut Vec::new(), &mut out);
    }
    out
}

/// Complement of `A+B` lies in a coset of a subgroup of index `2^k`, and
/// strictly so when `mu = 1`; decided by trying every such coset.
pub fn containment_conclusion(n: u32, a: &[u32], b: &[u32], k: u32) -> bool {
    let s = sumset(n, a, b);
    let sum_ind = indicator(n, &s);
    let comp: Vec<u32> = (0..1u32 << n).filter(|&x| !sum_ind[x as usize]).collect();
    if comp.is_empty() {
        return true;
    }
    if k > n {
        return false;
    }
    let strict = mu(n, a, b) == 1;
    subgroups_of_dim(n, n - k).iter().any(|sub| {
        (0..1u32 << n).any(|x| {
            let coset = indicator(n, &sub.iter().map(|&h| h ^ x).collect::<Vec<_>>());
            comp.iter().all(|&c| coset[c as usize]) && (!strict || comp.len() < sub.len())
        })
    })
}

pub fn main_hypotheses(n: u32, a: &[u32], b: &[u32]) -> bool {
    let s = sumset(n, a, b).len();
    spans(n, a) && spans(n, b) && s < a.len() + b.len() && s < 1 << n
}

/// Complement of `2A` empty, or exactly a coset of a subgroup of index at
/// least 8; and `|2A| >= 7|G|/8`.
pub fn hp_conclusion(n: u32, a: &[u32]) -> bool {
    let s = sumset(n, a, a);
    let order = 1usize << n;
    if 8 * s.len() < 7 * order {
        return false;
    }
    let ind = indicator(n, &s);
    let comp: Vec<u32> = (0..1u32 << n).filter(|&x| !ind[x as usize]).collect();
    if comp.is_empty() {
        return true;
    }
    let (_, sub) = affine_span(n, &comp);
    sub.len() == comp.len() && order / sub.len() >= 8
}
