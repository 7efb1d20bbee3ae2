//! The recursive loop: dichotomy, potential-reducing steps, deflation, and small-block solves.

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::deflate::{split_at_zeros, zero_small_subdiagonals};
use super::{GlobalData, RunParams};
use crate::error::{Error, Result};
use crate::iqr::potential;
use crate::matrix::{DenseMatrix, HessenbergMatrix};
use crate::numkernel::{to_c64, Real};
use crate::ritz::{ritz_or_decouple, SmallEigSolver};
use crate::shifting::{sh_step, Branch};

pub const MAX_RETRIES: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepKind {
    Decouple,
    RitzShift,
    Exceptional,
}

impl StepKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StepKind::Decouple => "decouple",
            StepKind::RitzShift => Branch::RitzShift.as_str(),
            StepKind::Exceptional => Branch::Exceptional.as_str(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    /// `ψ_k` at the start of the iteration.
    pub psi_k: f64,
    pub kind: StepKind,
    pub shift: Complex<f64>,
    /// `ψ_k` after the step, zero when it decoupled.
    pub psi_after: f64,
    pub retries: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockNode {
    pub id: usize,
    pub parent: Option<usize>,
    /// Row offset of the block inside the original matrix.
    pub offset: usize,
    pub dim: usize,
    pub children: Vec<usize>,
    pub iterations: Vec<IterationRecord>,
    /// Solved directly by the small eigenvalue solver.
    pub leaf: bool,
    pub small_retries: usize,
    pub matrix: Option<DenseMatrix<f64>>,
    /// Final iterate with its negligible subdiagonals zeroed, before splitting.
    pub zeroed: Option<DenseMatrix<f64>>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct DeflationTree {
    pub nodes: Vec<BlockNode>,
}

impl DeflationTree {
    pub fn leaves(&self) -> impl Iterator<Item = &BlockNode> {
        self.nodes.iter().filter(|n| n.leaf)
    }

    pub fn total_iterations(&self) -> usize {
        self.nodes.iter().map(|n| n.iterations.len()).sum()
    }
}

#[derive(Clone, Debug)]
pub struct QrOutput<T: Real> {
    /// Eigenvalues ordered by block position, each with the id of the leaf that produced it.
    pub eigenvalues: Vec<(Complex<T>, usize)>,
    pub tree: DeflationTree,
}

#[derive(Clone, Copy, Debug)]
pub struct LoopOptions {
    pub max_retries: usize,
    pub capture_blocks: bool,
}

impl Default for LoopOptions {
    fn default() -> Self {
        Self {
            max_retries: MAX_RETRIES,
            capture_blocks: false,
        }
    }
}

/// Independent stream for block `id`; stream 0 is reserved for preprocessing.
pub fn block_rng(seed: u64, id: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id as u64 + 1);
    rng
}

fn with_retries<X>(
    block: usize,
    max: usize,
    mut f: impl FnMut() -> Result<X>,
) -> Result<(X, usize)> {
    let mut attempt = 0;
    loop {
        match f() {
            Ok(x) => return Ok((x, attempt)),
            Err(e) if e.is_retryable() => {
                if attempt >= max {
                    return Err(Error::RetriesExhausted {
                        block,
                        attempts: attempt + 1,
                        last: Box::new(e),
                    });
                }
                log::debug!("block {block}: retrying after {e}");
                attempt += 1;
            }
            Err(e) => return Err(e),
        }
    }
}

struct Task<T: Real> {
    id: usize,
    parent: Option<usize>,
    offset: usize,
    h: HessenbergMatrix<T>,
    /// Accuracy and failure tolerance for a direct solve; `None` runs the loop.
    small: Option<(f64, f64)>,
}

struct Done<T: Real> {
    node: BlockNode,
    eigenvalues: Vec<Complex<T>>,
    blocks: Vec<(usize, HessenbergMatrix<T>)>,
}

fn capture<T: Real>(h: &HessenbergMatrix<T>) -> DenseMatrix<f64> {
    h.as_dense().cast()
}

fn run_task<T: Real>(
    task: &Task<T>,
    g: &GlobalData,
    rp: &RunParams,
    solver: &dyn SmallEigSolver<T>,
    opts: LoopOptions,
) -> Result<Done<T>> {
    let mut node = BlockNode {
        id: task.id,
        parent: task.parent,
        offset: task.offset,
        dim: task.h.n(),
        children: Vec::new(),
        iterations: Vec::new(),
        leaf: task.small.is_some(),
        small_retries: 0,
        matrix: opts.capture_blocks.then(|| capture(&task.h)),
        zeroed: None,
    };
    if let Some((beta, phi)) = task.small {
        let (eigenvalues, retries) = with_retries(task.id, opts.max_retries, || {
            solver.solve(task.h.as_dense(), beta, phi)
        })?;
        if eigenvalues.len() != task.h.n() {
            return Err(Error::SmallEig(format!(
                "solver returned {} of {} eigenvalues",
                eigenvalues.len(),
                task.h.n()
            )));
        }
        node.small_retries = retries;
        return Ok(Done {
            node,
            eigenvalues,
            blocks: Vec::new(),
        });
    }

    let k = g.k;
    let omega = rp.omega;
    let budget = rp.budget();
    let mut rng = block_rng(rp.seed, task.id);
    let mut h = task.h.clone();
    while !h.is_decoupled(k, omega) {
        let iteration = node.iterations.len();
        if iteration >= budget {
            log::warn!(
                "block {} exhausted its budget of {budget} iterations; trace: {:?}",
                task.id,
                node.iterations
            );
            return Err(Error::BudgetExceeded {
                block: task.id,
                budget,
            });
        }
        let psi_k = potential(&h, k)?.to_f64();
        let (rod, r1) = with_retries(task.id, opts.max_retries, || {
            ritz_or_decouple(&h, omega, rp.phi_working, g, solver, &mut rng)
        })?;
        if rod.dec {
            h = rod.next_h;
            let shift = to_c64(rod.culprit.expect("decoupling outcome carries its shift"));
            node.iterations.push(IterationRecord {
                iteration,
                psi_k,
                kind: StepKind::Decouple,
                shift,
                psi_after: 0.0,
                retries: r1,
            });
            continue;
        }
        let (step, r2) = with_retries(task.id, opts.max_retries, || {
            sh_step(&h, &rod.ritz_values, omega, g, &mut rng)
        })?;
        let kind = match step.branch {
            Branch::RitzShift => StepKind::RitzShift,
            Branch::Exceptional => StepKind::Exceptional,
        };
        node.iterations.push(IterationRecord {
            iteration,
            psi_k,
            kind,
            shift: to_c64(step.shift_used.roots()[0]),
            psi_after: step.psi_after,
            retries: r1 + r2,
        });
        h = step.next_h;
    }
    let zeroed = zero_small_subdiagonals(&h, omega, k);
    if opts.capture_blocks {
        node.zeroed = Some(capture(&zeroed));
    }
    let blocks = split_at_zeros(&zeroed)
        .into_iter()
        .map(|(o, b)| (task.offset + o, b))
        .collect();
    Ok(Done {
        node,
        eigenvalues: Vec::new(),
        blocks,
    })
}

/// Eigenvalues of `h` by the randomized shifted QR recursion; blocks of one level run in parallel.
pub fn shifted_qr<T: Real>(
    h: &HessenbergMatrix<T>,
    g: &GlobalData,
    rp: &RunParams,
    solver: &dyn SmallEigSolver<T>,
    opts: LoopOptions,
) -> Result<QrOutput<T>> {
    let n = h.n();
    if n == 0 {
        return Err(Error::Dimension("empty matrix".into()));
    }
    if !h.as_dense().is_finite() {
        return Err(Error::NonFinite("input matrix"));
    }
    let n0 = g.n0.max(n) as f64;
    let leaf_params = (rp.delta / n0, rp.phi / (3.0 * n0));
    let root_small = (n <= g.k).then_some((rp.delta, rp.phi));
    let mut frontier = vec![Task {
        id: 0,
        parent: None,
        offset: 0,
        h: h.clone(),
        small: root_small,
    }];
    let mut nodes: Vec<BlockNode> = Vec::new();
    let mut found: Vec<(usize, usize, Vec<Complex<T>>)> = Vec::new();
    let mut next_id = 1;
    while !frontier.is_empty() {
        let done: Vec<Result<Done<T>>> = frontier
            .par_iter()
            .map(|t| run_task(t, g, rp, solver, opts))
            .collect();
        let mut next = Vec::new();
        for d in done {
            let Done {
                mut node,
                eigenvalues,
                blocks,
            } = d?;
            if node.leaf {
                found.push((node.offset, node.id, eigenvalues));
            }
            for (offset, b) in blocks {
                node.children.push(next_id);
                let small = (b.n() <= g.k).then_some(leaf_params);
                next.push(Task {
                    id: next_id,
                    parent: Some(node.id),
                    offset,
                    h: b,
                    small,
                });
                next_id += 1;
            }
            nodes.push(node);
        }
        frontier = next;
    }
    nodes.sort_by_key(|n| n.id);
    found.sort_by_key(|(offset, _, _)| *offset);
    let eigenvalues = found
        .into_iter()
        .flat_map(|(_, id, ev)| ev.into_iter().map(move |z| (z, id)))
        .collect();
    Ok(QrOutput {
        eigenvalues,
        tree: DeflationTree { nodes },
    })
}
