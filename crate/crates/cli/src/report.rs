//! JSON eigenvalue report and CSV potential trace.

use std::io::Write;

use hessqr::driver::Solution;
use serde::{Deserialize, Serialize};

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
    pub block: usize,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct Parameters {
    pub b: f64,
    pub gap_bound: f64,
    pub sigma: f64,
    pub k: usize,
    pub alpha: f64,
    pub theta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub phi: f64,
    pub omega: f64,
    pub phi_working: f64,
    pub n_dec: f64,
    pub budget: usize,
    pub degree_feasible: bool,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct Block {
    pub id: usize,
    pub parent: Option<usize>,
    pub offset: usize,
    pub dim: usize,
    pub leaf: bool,
    pub children: Vec<usize>,
    pub psi_k: Vec<f64>,
    pub branches: Vec<String>,
    pub shifts: Vec<[f64; 2]>,
    pub retries: usize,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct Report {
    pub n: usize,
    pub seed: u64,
    pub precision_bits: u32,
    pub required_bits: u32,
    pub parameters: Parameters,
    pub eigenvalues: Vec<Eigenvalue>,
    pub blocks: Vec<Block>,
}

impl Report {
    pub fn new(sol: &Solution) -> Self {
        let g = &sol.globals;
        let r = &sol.run;
        Self {
            n: sol.eigenvalues.len(),
            seed: r.seed,
            precision_bits: sol.precision_bits,
            required_bits: sol.required_bits,
            parameters: Parameters {
                b: g.b,
                gap_bound: g.gap_bound,
                sigma: g.sigma,
                k: g.k,
                alpha: g.alpha,
                theta: g.theta,
                gamma: g.gamma,
                delta: r.delta,
                phi: r.phi,
                omega: r.omega,
                phi_working: r.phi_working,
                n_dec: r.n_dec,
                budget: r.budget(),
                degree_feasible: g.degree_is_feasible(),
            },
            eigenvalues: sol
                .eigenvalues
                .iter()
                .zip(&sol.blocks)
                .map(|(z, &block)| Eigenvalue {
                    re: z.re,
                    im: z.im,
                    block,
                })
                .collect(),
            blocks: sol
                .tree
                .nodes
                .iter()
                .map(|b| Block {
                    id: b.id,
                    parent: b.parent,
                    offset: b.offset,
                    dim: b.dim,
                    leaf: b.leaf,
                    children: b.children.clone(),
                    psi_k: b.iterations.iter().map(|it| it.psi_k).collect(),
                    branches: b
                        .iterations
                        .iter()
                        .map(|it| it.kind.as_str().to_string())
                        .collect(),
                    shifts: b
                        .iterations
                        .iter()
                        .map(|it| [it.shift.re, it.shift.im])
                        .collect(),
                    retries: b.small_retries
                        + b.iterations.iter().map(|it| it.retries).sum::<usize>(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct TraceRow {
    pub block_id: usize,
    pub iteration: usize,
    pub psi_k: f64,
    pub branch: String,
    pub shift_re: f64,
    pub shift_im: f64,
}

pub fn write_trace(sol: &Solution, out: impl Write) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for node in &sol.tree.nodes {
        for it in &node.iterations {
            w.serialize(TraceRow {
                block_id: node.id,
                iteration: it.iteration,
                psi_k: it.psi_k,
                branch: it.kind.as_str().to_string(),
                shift_re: it.shift.re,
                shift_im: it.shift.im,
            })?;
        }
    }
    // header even for an empty trace
    if sol.tree.total_iterations() == 0 {
        w.write_record([
            "block_id",
            "iteration",
            "psi_k",
            "branch",
            "shift_re",
            "shift_im",
        ])?;
    }
    w.flush()?;
    Ok(())
}
