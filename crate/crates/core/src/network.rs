//! Structured networks of MIMO node systems.
//!
//! Node `k` is a structured system `(A_k, B_k, C_k)` with `n_k` states,
//! `r_k` inputs and `p_k` outputs. Nodes are coupled through the blocked
//! interconnection pattern `W` (`r x p`, block `(k, j)` is `r_k x p_j`) and
//! driven by external inputs through `H` (`r x m`, block `(k, i)` is
//! `r_k x 1`). The closed loop is `x' = (A + BWC)x + BHu` with block
//! diagonal `A`, `B`, `C`.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{is_full_row_rank, ColoringResult, PatternGraph};
use crate::pattern::{is_unit_star as unit_star, product_exactness, PatternMatrix, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeSystem {
    #[serde(rename = "A")]
    pub a: PatternMatrix,
    #[serde(rename = "B")]
    pub b: PatternMatrix,
    #[serde(rename = "C")]
    pub c: PatternMatrix,
}

impl NodeSystem {
    pub fn new(a: PatternMatrix, b: PatternMatrix, c: PatternMatrix) -> Self {
        Self { a, b, c }
    }

    pub fn states(&self) -> usize {
        self.a.rows()
    }

    pub fn inputs(&self) -> usize {
        self.b.cols()
    }

    pub fn outputs(&self) -> usize {
        self.c.rows()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuredNetwork {
    pub nodes: Vec<NodeSystem>,
    #[serde(rename = "W")]
    pub w: PatternMatrix,
    #[serde(rename = "H")]
    pub h: PatternMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MatrixName {
    A,
    B,
    C,
    W,
    H,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Line {
    Row(usize),
    Column(usize),
}

/// One failed dimension or input/output-structure check. Node, row and
/// column numbers are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub node: Option<usize>,
    pub matrix: MatrixName,
    pub line: Option<Line>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(k) = self.node {
            write!(f, "node {k}: ")?;
        }
        write!(f, "{:?}", self.matrix)?;
        match self.line {
            Some(Line::Row(i)) => write!(f, " row {i}")?,
            Some(Line::Column(j)) => write!(f, " column {j}")?,
            None => {}
        }
        write!(f, ": {}", self.message)
    }
}

/// `[A + BWC, BH]` and `[A + I + BWC, BH]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AssembledPatterns {
    pub plain: PatternMatrix,
    pub shifted: PatternMatrix,
}

/// Verdict of the two-coloring test on a structured system `(A, B)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SystemCheck {
    pub controllable: bool,
    pub plain: ColoringResult,
    pub shifted: ColoringResult,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NodeCheck {
    pub node: usize,
    pub controllable: bool,
    pub certificate: SystemCheck,
}

/// Per-block summaries of `W` (`N x N`) and `H` (`N x m`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Topology {
    pub w: PatternMatrix,
    pub h: PatternMatrix,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TopologyCheck {
    pub topology: Topology,
    pub weakly_colorable: bool,
    pub coloring: ColoringResult,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnalysisReport {
    pub violations: Vec<Violation>,
    pub assembled: Option<AssembledPatterns>,
    pub controllable: Option<bool>,
    pub network_check: Option<SystemCheck>,
    pub node_checks: Option<Vec<NodeCheck>>,
    pub topology_check: Option<TopologyCheck>,
}

impl StructuredNetwork {
    pub fn new(nodes: Vec<NodeSystem>, w: PatternMatrix, h: PatternMatrix) -> Self {
        Self { nodes, w, h }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("networks always serialize")
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn external_inputs(&self) -> usize {
        self.h.cols()
    }

    pub fn total_states(&self) -> usize {
        self.nodes.iter().map(NodeSystem::states).sum()
    }

    /// Row offsets of the node input blocks in `W` and `H`.
    pub fn input_offsets(&self) -> Vec<usize> {
        offsets(self.nodes.iter().map(NodeSystem::inputs))
    }

    /// Column offsets of the node output blocks in `W`.
    pub fn output_offsets(&self) -> Vec<usize> {
        offsets(self.nodes.iter().map(NodeSystem::outputs))
    }

    /// Collects every dimension inconsistency and every column of `B_k`
    /// or row of `C_k` that is not a single `*` among zeros.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut push = |node, matrix, line, message: String| {
            out.push(Violation {
                node,
                matrix,
                line,
                message,
            })
        };
        for (k, node) in self.nodes.iter().enumerate() {
            let k = Some(k + 1);
            let n = node.a.rows();
            if node.a.cols() != n {
                push(
                    k,
                    MatrixName::A,
                    None,
                    format!("not square: {:?}", node.a.shape()),
                );
            }
            if node.b.rows() != n {
                push(
                    k,
                    MatrixName::B,
                    None,
                    format!("has {} rows, A has {n}", node.b.rows()),
                );
            }
            if node.c.cols() != n {
                push(
                    k,
                    MatrixName::C,
                    None,
                    format!("has {} columns, A has {n}", node.c.cols()),
                );
            }
            for j in 0..node.b.cols() {
                if !unit_star(node.b.column(j)) {
                    push(
                        k,
                        MatrixName::B,
                        Some(Line::Column(j + 1)),
                        "input must drive exactly one state (one * and zeros elsewhere)".into(),
                    );
                }
            }
            for i in 0..node.c.rows() {
                if !unit_star(node.c.row(i).iter().copied()) {
                    push(
                        k,
                        MatrixName::C,
                        Some(Line::Row(i + 1)),
                        "output must read exactly one state (one * and zeros elsewhere)".into(),
                    );
                }
            }
        }
        let r: usize = self.nodes.iter().map(NodeSystem::inputs).sum();
        let p: usize = self.nodes.iter().map(NodeSystem::outputs).sum();
        if self.w.shape() != (r, p) {
            push(
                None,
                MatrixName::W,
                None,
                format!(
                    "has shape {:?}, node blocks require {:?}",
                    self.w.shape(),
                    (r, p)
                ),
            );
        }
        if self.h.rows() != r {
            push(
                None,
                MatrixName::H,
                None,
                format!("has {} rows, node inputs total {r}", self.h.rows()),
            );
        }
        out
    }

    fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::AssumptionViolated(v))
        }
    }

    fn stacked(&self) -> (PatternMatrix, PatternMatrix, PatternMatrix) {
        let a =
            PatternMatrix::block_diag(&self.nodes.iter().map(|n| n.a.clone()).collect::<Vec<_>>());
        let b =
            PatternMatrix::block_diag(&self.nodes.iter().map(|n| n.b.clone()).collect::<Vec<_>>());
        let c =
            PatternMatrix::block_diag(&self.nodes.iter().map(|n| n.c.clone()).collect::<Vec<_>>());
        (a, b, c)
    }

    /// Builds `[A + BWC, BH]` and `[A + I + BWC, BH]`, with the products
    /// taken as `B(WC)`.
    pub fn assemble(&self) -> Result<AssembledPatterns> {
        self.assemble_with(|b, w, c| b.mul(&w.mul(c)?))
    }

    /// As [`assemble`](Self::assemble) but with the product taken as `(BW)C`.
    pub fn assemble_left_assoc(&self) -> Result<AssembledPatterns> {
        self.assemble_with(|b, w, c| b.mul(w)?.mul(c))
    }

    fn assemble_with(
        &self,
        bwc: impl Fn(&PatternMatrix, &PatternMatrix, &PatternMatrix) -> Result<PatternMatrix>,
    ) -> Result<AssembledPatterns> {
        self.ensure_valid()?;
        let (a, b, c) = self.stacked();
        // both factors below are exact products (unit-star rows of C,
        // unit-star columns of B) once validation passed
        debug_assert!(product_exactness(&self.w, &c)?.is_exact());
        debug_assert!(product_exactness(&b, &self.h)?.is_exact());
        let coupling = bwc(&b, &self.w, &c)?;
        let bh = b.mul(&self.h)?;
        let drift = a.add(&coupling)?;
        let shifted = a.add(&PatternMatrix::identity(a.rows()))?.add(&coupling)?;
        Ok(AssembledPatterns {
            plain: drift.hstack(&bh)?,
            shifted: shifted.hstack(&bh)?,
        })
    }

    /// Full-network decision: both assembled patterns must be colorable.
    pub fn is_controllable(&self) -> Result<SystemCheck> {
        let asm = self.assemble()?;
        both_colorable(&asm.plain, &asm.shifted)
    }

    /// Node-level necessary condition: each `(A_k, B_k)` must be
    /// controllable on its own.
    pub fn node_necessary_check(&self) -> Result<Vec<NodeCheck>> {
        self.ensure_valid()?;
        self.nodes
            .iter()
            .enumerate()
            .map(|(k, node)| {
                let certificate = check_structured_system(&node.a, &node.b)?;
                Ok(NodeCheck {
                    node: k + 1,
                    controllable: certificate.controllable,
                    certificate,
                })
            })
            .collect()
    }

    /// Collapses each block of `W` and `H` to a single symbol: `0` for an
    /// all-zero block, `*` if it contains a `*`, `?` otherwise.
    pub fn extract_topology(&self) -> Result<Topology> {
        self.ensure_valid()?;
        let rows = self.input_offsets();
        let cols = self.output_offsets();
        let n = self.node_count();
        let m = self.external_inputs();
        let mut w = PatternMatrix::zeros(n, n);
        let mut h = PatternMatrix::zeros(n, m);
        for i in 0..n {
            let (r0, rh) = (rows[i], rows[i + 1] - rows[i]);
            for j in 0..n {
                let block = self.w.submatrix(r0, cols[j], rh, cols[j + 1] - cols[j]);
                w.set(i, j, summarize_block(&block));
            }
            for j in 0..m {
                h.set(i, j, summarize_block(&self.h.submatrix(r0, j, rh, 1)));
            }
        }
        Ok(Topology { w, h })
    }

    /// Topology-level necessary condition: `G([W~ H~])` must be weakly
    /// colorable.
    pub fn topology_necessary_check(&self) -> Result<TopologyCheck> {
        let topology = self.extract_topology()?;
        let graph = PatternGraph::build(&topology.w.hstack(&topology.h)?)?;
        let coloring = graph.weak_color_change();
        Ok(TopologyCheck {
            weakly_colorable: coloring.colorable,
            coloring,
            topology,
        })
    }

    /// Runs validation and, when clean, every check.
    pub fn analyze(&self) -> AnalysisReport {
        let violations = self.validate();
        if !violations.is_empty() {
            return AnalysisReport {
                violations,
                assembled: None,
                controllable: None,
                network_check: None,
                node_checks: None,
                topology_check: None,
            };
        }
        let checks = || -> Result<AnalysisReport> {
            let assembled = self.assemble()?;
            let (network_check, (node_checks, topology_check)) = rayon::join(
                || both_colorable(&assembled.plain, &assembled.shifted),
                || (self.node_necessary_check(), self.topology_necessary_check()),
            );
            let network_check = network_check?;
            Ok(AnalysisReport {
                violations: Vec::new(),
                controllable: Some(network_check.controllable),
                assembled: Some(assembled),
                network_check: Some(network_check),
                node_checks: Some(node_checks?),
                topology_check: Some(topology_check?),
            })
        };
        checks().expect("validated networks assemble and color")
    }
}

fn offsets(sizes: impl Iterator<Item = usize>) -> Vec<usize> {
    let mut out = vec![0];
    for s in sizes {
        out.push(out.last().unwrap() + s);
    }
    out
}

fn summarize_block(block: &PatternMatrix) -> Symbol {
    let mut seen_any = false;
    for (_, s) in block.iter() {
        match s {
            Symbol::Star => return Symbol::Star,
            Symbol::Any => seen_any = true,
            Symbol::Zero => {}
        }
    }
    if seen_any {
        Symbol::Any
    } else {
        Symbol::Zero
    }
}

fn both_colorable(plain: &PatternMatrix, shifted: &PatternMatrix) -> Result<SystemCheck> {
    let (plain, shifted) = rayon::join(|| is_full_row_rank(plain), || is_full_row_rank(shifted));
    let (plain, shifted) = (plain?, shifted?);
    Ok(SystemCheck {
        controllable: plain.colorable && shifted.colorable,
        plain,
        shifted,
    })
}

/// Strong structural controllability of `(A, B)`: `[A B]` and `[A+I B]`
/// must both be colorable.
pub fn check_structured_system(a: &PatternMatrix, b: &PatternMatrix) -> Result<SystemCheck> {
    if a.rows() != a.cols() || b.rows() != a.rows() {
        return Err(Error::DimensionMismatch {
            op: "check_structured_system",
            left: a.shape(),
            right: b.shape(),
        });
    }
    let plain = a.hstack(b)?;
    let shifted = a.add(&PatternMatrix::identity(a.rows()))?.hstack(b)?;
    both_colorable(&plain, &shifted)
}

fn fmt_set(set: &std::collections::BTreeSet<usize>) -> String {
    let items: Vec<String> = set.iter().map(usize::to_string).collect();
    format!("{{{}}}", items.join(", "))
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

impl fmt::Display for AnalysisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.violations.is_empty() {
            writeln!(
                f,
                "invalid network ({} violation(s)):",
                self.violations.len()
            )?;
            for v in &self.violations {
                writeln!(f, "  {v}")?;
            }
            return Ok(());
        }
        let (Some(net), Some(nodes), Some(topo)) =
            (&self.network_check, &self.node_checks, &self.topology_check)
        else {
            return Ok(());
        };
        let shape = self
            .assembled
            .as_ref()
            .map(|a| a.plain.shape())
            .unwrap_or_default();
        writeln!(f, "{:<28}{}", "controllable:", yes_no(net.controllable))?;
        writeln!(
            f,
            "{:<28}{}x{}",
            "assembled pattern size:", shape.0, shape.1
        )?;
        for (label, c) in [("[A+BWC BH]", &net.plain), ("[A+I+BWC BH]", &net.shifted)] {
            write!(
                f,
                "{:<28}{}",
                format!("{label} colorable:"),
                yes_no(c.colorable)
            )?;
            if !c.colorable {
                write!(f, "  uncolored = {}", fmt_set(&c.uncolored))?;
            }
            writeln!(f, "  ({} forcings)", c.forcing_sequence.len())?;
        }
        writeln!(f, "node checks (necessary):")?;
        for n in nodes {
            write!(
                f,
                "  {:<26}{}",
                format!("node {}:", n.node),
                yes_no(n.controllable)
            )?;
            if !n.controllable {
                let c = &n.certificate;
                let failed = if c.plain.colorable {
                    &c.shifted
                } else {
                    &c.plain
                };
                write!(f, "  uncolored = {}", fmt_set(&failed.uncolored))?;
            }
            writeln!(f)?;
        }
        write!(
            f,
            "{:<28}{}",
            "topology weakly colorable:",
            yes_no(topo.weakly_colorable)
        )?;
        if !topo.weakly_colorable {
            write!(f, "  unreached = {}", fmt_set(&topo.coloring.uncolored))?;
        }
        writeln!(f)
    }
}
