//! The digraph of a pattern matrix and the two color change rules on it.
//!
//! For a `p x q` pattern `M` (with `p <= q`) the graph has vertices
//! `1..=q` and an edge `(j, i)` whenever `M[i][j]` is nonzero, so column
//! vertices point at the row vertices they touch. Edges from `*` entries
//! and from `?` entries are kept apart because only the former can force.
//!
//! All vertex labels exposed by this module are 1-based.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pattern::{PatternMatrix, Symbol};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternGraph {
    num_vertices: usize,
    row_count: usize,
    // out[v] = (row, is_star) for every nonzero entry in column v, 0-based
    out: Vec<Vec<(usize, bool)>>,
    // inn[i] = columns with a nonzero entry in row i, 0-based
    inn: Vec<Vec<usize>>,
}

/// Which color change rule produced a [`ColoringResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ColorRule {
    /// Start all white; a vertex with exactly one white out-neighbor forces
    /// it along a `*` edge.
    Standard,
    /// Seed the non-row vertices black; black vertices force every white
    /// out-neighbor reached by a `*` edge.
    Weak,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Force {
    pub forcer: usize,
    pub forced: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColoringResult {
    pub rule: ColorRule,
    pub seeds: BTreeSet<usize>,
    pub derived_set: BTreeSet<usize>,
    pub forcing_sequence: Vec<Force>,
    pub colorable: bool,
    /// Vertices that had to turn black for the graph to be (weakly)
    /// colorable but did not.
    pub uncolored: BTreeSet<usize>,
}

/// A step of a forcing sequence that is not legal at the point it is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IllegalForce {
    pub step: usize,
    pub force: Force,
}

impl PatternGraph {
    /// Builds `G(M)`. Requires `M.rows() <= M.cols()`.
    pub fn build(m: &PatternMatrix) -> Result<Self> {
        let (p, q) = m.shape();
        if p > q {
            return Err(Error::BadShape { rows: p, cols: q });
        }
        let mut out = vec![Vec::new(); q];
        let mut inn = vec![Vec::new(); p];
        for ((i, j), s) in m.iter() {
            match s {
                Symbol::Zero => continue,
                Symbol::Star => out[j].push((i, true)),
                Symbol::Any => out[j].push((i, false)),
            }
            inn[i].push(j);
        }
        Ok(Self {
            num_vertices: q,
            row_count: p,
            out,
            inn,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn row_count(&self) -> usize {
        self.row_count
    }

    /// Edges `(j, i)` with `M[i][j] = *`, 1-based.
    pub fn edges_star(&self) -> BTreeSet<(usize, usize)> {
        self.edges_where(true)
    }

    /// Edges `(j, i)` with `M[i][j] = ?`, 1-based.
    pub fn edges_any(&self) -> BTreeSet<(usize, usize)> {
        self.edges_where(false)
    }

    fn edges_where(&self, star: bool) -> BTreeSet<(usize, usize)> {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(j, outs)| {
                outs.iter()
                    .filter(move |&&(_, s)| s == star)
                    .map(move |&(i, _)| (j + 1, i + 1))
            })
            .collect()
    }

    /// Out-neighbors of vertex `v` (1-based in and out).
    pub fn out_neighbors(&self, v: usize) -> Vec<usize> {
        self.out[v - 1].iter().map(|&(i, _)| i + 1).collect()
    }

    fn is_star_edge(&self, from: usize, to: usize) -> bool {
        self.out[from].iter().any(|&(i, s)| s && i == to)
    }

    /// Runs the standard color change rule to its fixpoint.
    pub fn color_change(&self) -> ColoringResult {
        let q = self.num_vertices;
        let mut black = vec![false; q];
        let mut white_out: Vec<usize> = self.out.iter().map(Vec::len).collect();
        let mut queue: VecDeque<usize> = (0..q).filter(|&v| white_out[v] == 1).collect();
        let mut sequence = Vec::new();

        while let Some(v) = queue.pop_front() {
            if white_out[v] != 1 {
                continue;
            }
            let &(target, star) = self.out[v]
                .iter()
                .find(|&&(i, _)| !black[i])
                .expect("count says one white out-neighbor");
            if !star {
                continue;
            }
            black[target] = true;
            sequence.push(Force {
                forcer: v + 1,
                forced: target + 1,
            });
            for &u in &self.inn[target] {
                white_out[u] -= 1;
                if white_out[u] == 1 {
                    queue.push_back(u);
                }
            }
        }
        self.finish(ColorRule::Standard, &black, sequence)
    }

    /// Runs the weak color change rule: reachability along `*` edges from
    /// the non-row vertices `p+1..=q`.
    pub fn weak_color_change(&self) -> ColoringResult {
        let mut black = self.initial_coloring(ColorRule::Weak);
        let mut queue: VecDeque<usize> = (self.row_count..self.num_vertices).collect();
        let mut sequence = Vec::new();
        while let Some(v) = queue.pop_front() {
            for &(i, star) in &self.out[v] {
                if star && !black[i] {
                    black[i] = true;
                    sequence.push(Force {
                        forcer: v + 1,
                        forced: i + 1,
                    });
                    queue.push_back(i);
                }
            }
        }
        self.finish(ColorRule::Weak, &black, sequence)
    }

    /// Same fixpoint as [`color_change`](Self::color_change) /
    /// [`weak_color_change`](Self::weak_color_change), but rescans all
    /// currently legal forces after every step and applies one chosen at
    /// random. Quadratic; intended for checking order independence.
    pub fn color_change_random_order<R: Rng + ?Sized>(
        &self,
        rule: ColorRule,
        rng: &mut R,
    ) -> ColoringResult {
        let mut black = self.initial_coloring(rule);
        let mut sequence = Vec::new();
        loop {
            let legal: Vec<Force> = (0..self.num_vertices)
                .flat_map(|v| {
                    self.out[v]
                        .iter()
                        .filter(|&&(i, _)| !black[i])
                        .map(move |&(i, _)| Force {
                            forcer: v + 1,
                            forced: i + 1,
                        })
                })
                .filter(|&f| self.force_is_legal(rule, &black, f))
                .collect();
            let Some(&f) = legal.choose(rng) else {
                break;
            };
            black[f.forced - 1] = true;
            sequence.push(f);
        }
        self.finish(rule, &black, sequence)
    }

    /// Re-applies a forcing sequence from the rule's initial coloring,
    /// checking each step, and returns the resulting black set.
    pub fn replay(
        &self,
        rule: ColorRule,
        sequence: &[Force],
    ) -> std::result::Result<BTreeSet<usize>, IllegalForce> {
        let mut black = self.initial_coloring(rule);
        for (step, &force) in sequence.iter().enumerate() {
            let in_range = (1..=self.num_vertices).contains(&force.forcer)
                && (1..=self.row_count).contains(&force.forced);
            if !in_range || black[force.forced - 1] || !self.force_is_legal(rule, &black, force) {
                return Err(IllegalForce { step, force });
            }
            black[force.forced - 1] = true;
        }
        Ok(to_labels(&black))
    }

    fn initial_coloring(&self, rule: ColorRule) -> Vec<bool> {
        let mut black = vec![false; self.num_vertices];
        if rule == ColorRule::Weak {
            black[self.row_count..].iter_mut().for_each(|b| *b = true);
        }
        black
    }

    fn force_is_legal(&self, rule: ColorRule, black: &[bool], f: Force) -> bool {
        let (v, target) = (f.forcer - 1, f.forced - 1);
        if black[target] || !self.is_star_edge(v, target) {
            return false;
        }
        match rule {
            ColorRule::Standard => self.out[v].iter().filter(|&&(i, _)| !black[i]).count() == 1,
            ColorRule::Weak => black[v],
        }
    }

    fn finish(
        &self,
        rule: ColorRule,
        black: &[bool],
        forcing_sequence: Vec<Force>,
    ) -> ColoringResult {
        let required = match rule {
            ColorRule::Standard => self.row_count,
            ColorRule::Weak => self.num_vertices,
        };
        let uncolored: BTreeSet<usize> = (0..required)
            .filter(|&v| !black[v])
            .map(|v| v + 1)
            .collect();
        let seeds = match rule {
            ColorRule::Standard => BTreeSet::new(),
            ColorRule::Weak => (self.row_count + 1..=self.num_vertices).collect(),
        };
        ColoringResult {
            rule,
            seeds,
            derived_set: to_labels(black),
            forcing_sequence,
            colorable: uncolored.is_empty(),
            uncolored,
        }
    }

    /// Graphviz rendering. `*` edges are solid, `?` edges dashed, and when a
    /// coloring is supplied its derived set is drawn filled black.
    pub fn to_dot(&self, coloring: Option<&ColoringResult>) -> String {
        let mut s = String::from("digraph G {\n    node [shape=circle];\n");
        for v in 1..=self.num_vertices {
            let mut attrs = Vec::new();
            if v > self.row_count {
                attrs.push("shape=box");
            }
            if coloring.is_some_and(|c| c.derived_set.contains(&v)) {
                attrs.push("style=filled, fillcolor=black, fontcolor=white");
            }
            if attrs.is_empty() {
                writeln!(s, "    {v};").unwrap();
            } else {
                writeln!(s, "    {v} [{}];", attrs.join(", ")).unwrap();
            }
        }
        for (j, outs) in self.out.iter().enumerate() {
            for &(i, star) in outs {
                let style = if star { "solid" } else { "dashed" };
                writeln!(s, "    {} -> {} [style={style}];", j + 1, i + 1).unwrap();
            }
        }
        s.push_str("}\n");
        s
    }
}

fn to_labels(black: &[bool]) -> BTreeSet<usize> {
    black
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(v, _)| v + 1)
        .collect()
}

/// Decides strong full row rank of `m` by colorability of `G(m)`; the
/// coloring is the certificate either way.
pub fn is_full_row_rank(m: &PatternMatrix) -> Result<ColoringResult> {
    Ok(PatternGraph::build(m)?.color_change())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::Symbol::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pm(rows: &[&[Symbol]]) -> PatternMatrix {
        PatternMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn build_small() {
        let g = PatternGraph::build(&pm(&[&[Star, Zero]])).unwrap();
        assert_eq!(g.num_vertices(), 2);
        assert_eq!(g.edges_star(), BTreeSet::from([(1, 1)]));
        assert!(g.edges_any().is_empty());
        let empty = PatternGraph::build(&PatternMatrix::zeros(1, 2)).unwrap();
        assert!(empty.edges_star().is_empty() && empty.edges_any().is_empty());
        assert!(matches!(
            PatternGraph::build(&PatternMatrix::zeros(2, 1)),
            Err(Error::BadShape { rows: 2, cols: 1 })
        ));
    }

    #[test]
    fn standard_rule_small() {
        let r = is_full_row_rank(&pm(&[&[Star, Zero]])).unwrap();
        assert_eq!(r.derived_set, BTreeSet::from([1]));
        assert!(r.colorable);
        for n in 1..6 {
            assert!(
                is_full_row_rank(&PatternMatrix::identity(n))
                    .unwrap()
                    .colorable
            );
        }
        assert!(
            !is_full_row_rank(&PatternMatrix::zeros(1, 1))
                .unwrap()
                .colorable
        );
        let any = is_full_row_rank(&pm(&[&[Any]])).unwrap();
        assert!(!any.colorable);
        assert_eq!(any.uncolored, BTreeSet::from([1]));
    }

    #[test]
    fn non_black_vertices_may_force() {
        // column 2 is never colored (not a row) but still forces row 1
        let r = is_full_row_rank(&pm(&[&[Any, Star]])).unwrap();
        assert!(r.colorable);
        assert_eq!(
            r.forcing_sequence,
            vec![Force {
                forcer: 2,
                forced: 1
            }]
        );
    }

    #[test]
    fn chain_needs_two_rounds() {
        // col 2 forces row 2, after which col 1 has one white neighbor left
        let r = is_full_row_rank(&pm(&[&[Star, Zero], &[Star, Star]])).unwrap();
        assert!(r.colorable);
        assert_eq!(r.forcing_sequence.len(), 2);
        assert!(
            !is_full_row_rank(&pm(&[&[Star, Star], &[Star, Star]]))
                .unwrap()
                .colorable
        );
    }

    #[test]
    fn weak_rule_small() {
        let g = PatternGraph::build(&pm(&[&[Zero, Star, Zero], &[Zero, Zero, Star]])).unwrap();
        let w = g.weak_color_change();
        assert!(w.colorable);
        assert_eq!(w.seeds, BTreeSet::from([3]));
        assert_eq!(w.derived_set, BTreeSet::from([1, 2, 3]));

        let no_star = PatternGraph::build(&pm(&[&[Any, Any, Any]])).unwrap();
        assert!(!no_star.weak_color_change().colorable);

        let square = PatternGraph::build(&PatternMatrix::zeros(1, 1)).unwrap();
        let w = square.weak_color_change();
        assert!(w.seeds.is_empty());
        assert!(!w.colorable);
    }

    #[test]
    fn weak_rule_needs_black_forcer() {
        // the seed reaches row 1 only through ?, so white vertex 1 cannot
        // force row 2 even though the standard rule would let it
        let g = PatternGraph::build(&pm(&[&[Zero, Zero, Any], &[Star, Zero, Zero]])).unwrap();
        let w = g.weak_color_change();
        assert!(!w.colorable);
        assert_eq!(w.uncolored, BTreeSet::from([1, 2]));
    }

    #[test]
    fn replay_detects_forgery() {
        let g = PatternGraph::build(&pm(&[&[Star, Zero], &[Star, Star]])).unwrap();
        let r = g.color_change();
        assert_eq!(
            g.replay(ColorRule::Standard, &r.forcing_sequence).unwrap(),
            r.derived_set
        );
        // column 1 still has two white out-neighbors at step 0
        let forged = [Force {
            forcer: 1,
            forced: 1,
        }];
        assert_eq!(
            g.replay(ColorRule::Standard, &forged),
            Err(IllegalForce {
                step: 0,
                force: forged[0]
            })
        );
    }

    #[test]
    fn random_order_matches_worklist() {
        let m = pm(&[
            &[Star, Any, Zero, Star, Zero],
            &[Zero, Star, Star, Zero, Zero],
            &[Any, Zero, Star, Zero, Star],
        ]);
        let g = PatternGraph::build(&m).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            for rule in [ColorRule::Standard, ColorRule::Weak] {
                let a = g.color_change_random_order(rule, &mut rng);
                let b = match rule {
                    ColorRule::Standard => g.color_change(),
                    ColorRule::Weak => g.weak_color_change(),
                };
                assert_eq!(a.derived_set, b.derived_set);
                assert_eq!(g.replay(rule, &a.forcing_sequence).unwrap(), a.derived_set);
            }
        }
    }

    #[test]
    fn dot_output() {
        let g = PatternGraph::build(&pm(&[&[Star]])).unwrap();
        let dot = g.to_dot(None);
        assert!(dot.starts_with("digraph"));
        assert!(dot.contains("1 -> 1 [style=solid];"));

        let empty = PatternGraph::build(&PatternMatrix::zeros(1, 3)).unwrap();
        let dot = empty.to_dot(None);
        assert!(dot.contains("    1;") && dot.contains("    3 [shape=box];"));
        assert!(!dot.contains("->"));

        let g = PatternGraph::build(&pm(&[&[Any, Star]])).unwrap();
        let dot = g.to_dot(Some(&g.color_change()));
        assert!(dot.contains("1 -> 1 [style=dashed];"));
        assert!(dot.contains("1 [style=filled"));
    }
}
