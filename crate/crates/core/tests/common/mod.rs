//! Standalone oracles shared by the integration and acceptance tests. Each
//! re-derives a quantity without going through the library's code path.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::f64::consts::{E, PI};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use mws_plan::netmodel::{Node, SpectrumGrid, Topology};

pub const H: f64 = 6.626_070_15e-34;
pub const NU: f64 = 193.414e12;

/// Implementation penalties by hand: rows QPSK/16QAM/64QAM, columns 35..140 GBd.
pub const PENALTY: [[f64; 4]; 3] = [
    [1.0, 1.5, 2.0, 2.5],
    [1.5, 2.0, 2.5, 3.0],
    [2.0, 2.5, 3.0, 3.5],
];

/// Gaussian tail by composite Simpson integration of the density.
pub fn q_numeric(x: f64) -> f64 {
    let (a, b, n) = (x, x + 12.0, 4000usize);
    let h = (b - a) / n as f64;
    let phi = |t: f64| (-t * t / 2.0).exp() / (2.0 * PI).sqrt();
    let mut s = phi(a) + phi(b);
    for i in 1..n {
        s += phi(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

pub fn ber(snr_lin: f64, m: f64) -> f64 {
    4.0 / m.log2() * (1.0 - 1.0 / m.sqrt()) * q_numeric((3.0 * snr_lin / (m - 1.0)).sqrt())
}

/// SNR (dB) at which the square-QAM BER drops to 3.5e-2.
pub fn threshold_db(m: f64) -> f64 {
    let (mut lo, mut hi) = (1e-3_f64, 1e4_f64);
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if ber(mid, m) > 0.035 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    10.0 * hi.log10()
}

/// Closed-form GN NLI of one 0.2 dB/km SSMF span, in SI units, mW.
pub fn nli_oracle_mw(len_km: f64, psd_dbm_ghz: f64, width_ghz: f64) -> f64 {
    let a_pow = 0.2 / (10.0 * E.log10()) / 1e3; // 1/m
    let l = len_km * 1e3;
    let l_eff = (1.0 - (-a_pow * l).exp()) / a_pow;
    let l_eff_a = 1.0 / a_pow;
    let b2 = 21.3e-27; // s²/m
    let gamma = 1.3e-3; // 1/(W m)
    let g = 10f64.powf(psd_dbm_ghz / 10.0) * 1e-3 / 1e9;
    let b = 4800e9;
    let g_nli = 8.0 / 27.0
        * gamma
        * gamma
        * g.powi(3)
        * l_eff
        * l_eff
        * (PI * PI / 2.0 * b2 * l_eff_a * b * b).asinh()
        / (PI * b2 * l_eff_a);
    g_nli * width_ghz * 1e9 * 1e3
}

/// EDFA ASE (NF 5 dB) compensating one span, mW.
pub fn ase_oracle_mw(len_km: f64, width_ghz: f64) -> f64 {
    let g = 10f64.powf(0.2 * len_km / 10.0);
    10f64.powf(0.5) * H * NU * (g - 1.0) * width_ghz * 1e9 * 1e3
}

/// Connected graph on 2..=8 nodes `n0..n7` with integer lengths.
pub fn random_topology(rng: &mut ChaCha8Rng) -> Topology {
    let n = rng.gen_range(2..=8);
    let nodes = (0..n)
        .map(|i| Node {
            id: format!("n{i}"),
            weight: 1.0,
        })
        .collect();
    let mut edges = BTreeSet::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        edges.insert((u, v));
    }
    for _ in 0..rng.gen_range(0..=n * 2) {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a != b {
            edges.insert((a.min(b), a.max(b)));
        }
    }
    let links = edges
        .into_iter()
        .map(|(a, b)| {
            (
                format!("n{a}"),
                format!("n{b}"),
                rng.gen_range(1..=6) as f64,
            )
        })
        .collect();
    Topology::new(nodes, links).unwrap()
}

/// Every simple path by DFS, sorted by (length, node sequence).
pub fn all_simple_paths(topo: &Topology, src: usize, dst: usize) -> Vec<(f64, Vec<usize>)> {
    fn dfs(
        topo: &Topology,
        cur: usize,
        dst: usize,
        len: f64,
        stack: &mut Vec<usize>,
        out: &mut Vec<(f64, Vec<usize>)>,
    ) {
        if cur == dst {
            out.push((len, stack.clone()));
            return;
        }
        for &(next, link) in topo.neighbors(cur) {
            if !stack.contains(&next) {
                stack.push(next);
                dfs(
                    topo,
                    next,
                    dst,
                    len + topo.links[link].length_km,
                    stack,
                    out,
                );
                stack.pop();
            }
        }
    }
    let mut out = Vec::new();
    dfs(topo, src, dst, 0.0, &mut vec![src], &mut out);
    out.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    out
}

pub fn exhaustive_first_fit(grid: &SpectrumGrid, links: &[usize], width: usize) -> Option<usize> {
    (0..=grid.slot_count().checked_sub(width)?)
        .find(|&s| (s..s + width).all(|slot| links.iter().all(|&l| grid.is_free(l, slot))))
}
