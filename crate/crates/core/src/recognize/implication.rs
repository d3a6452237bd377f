//! Literal implication graph behind renamable partially Horn recognition.
//!
//! Vertex `2(v-1)` stands for "x_v is admissible and renamed", vertex
//! `2(v-1)+1` (written x_v′) for "x_v is admissible and kept". An edge
//! `p → q` reads "if p holds then q holds".

use crate::formula::{Formula, Literal, Var};

pub(crate) struct ImplicationGraph {
    n: usize,
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

pub(crate) fn plain(v: Var) -> u32 {
    2 * (v - 1)
}

pub(crate) fn primed(v: Var) -> u32 {
    2 * (v - 1) + 1
}

/// Vertex made true when the literal's variable is admissible and the
/// literal ends up positive after renaming.
fn src(l: Literal) -> u32 {
    if l.positive {
        primed(l.var)
    } else {
        plain(l.var)
    }
}

/// Vertex made true when the literal ends up negative after renaming.
fn tgt(l: Literal) -> u32 {
    if l.positive {
        plain(l.var)
    } else {
        primed(l.var)
    }
}

impl ImplicationGraph {
    pub(crate) fn build(f: &Formula) -> Self {
        let n = f.n();
        let mut edges: Vec<(u32, u32)> = Vec::new();
        for c in f.clauses() {
            let ors = c.or_lits();
            for (i, &u) in ors.iter().enumerate() {
                for (j, &v) in ors.iter().enumerate() {
                    if i != j {
                        edges.push((src(u), tgt(v)));
                    }
                }
            }
            if let Some(&z) = c.xor_lits().first() {
                // A positive admissible or-literal would need z admissible,
                // which the self-loop pair below rules out.
                for &u in ors {
                    edges.push((src(u), plain(z.var)));
                    edges.push((primed(z.var), tgt(u)));
                }
                for l in c.xor_lits() {
                    edges.push((plain(l.var), primed(l.var)));
                    edges.push((primed(l.var), plain(l.var)));
                }
            }
        }
        let vertices = 2 * n;
        let mut offsets = vec![0usize; vertices + 1];
        for &(s, _) in &edges {
            offsets[s as usize + 1] += 1;
        }
        for i in 0..vertices {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0u32; edges.len()];
        for &(s, t) in &edges {
            targets[fill[s as usize]] = t;
            fill[s as usize] += 1;
        }
        let g = ImplicationGraph {
            n,
            offsets,
            targets,
        };
        debug_assert!(g.is_symmetric());
        g
    }

    pub(crate) fn vertex_count(&self) -> usize {
        2 * self.n
    }

    pub(crate) fn edge_count(&self) -> usize {
        self.targets.len()
    }

    pub(crate) fn successors(&self, v: u32) -> &[u32] {
        &self.targets[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }

    /// `p → q` present iff `q′ → p′` present, counting multiplicity.
    pub(crate) fn is_symmetric(&self) -> bool {
        let mut fwd: Vec<(u32, u32)> = Vec::with_capacity(self.edge_count());
        let mut mirrored: Vec<(u32, u32)> = Vec::with_capacity(self.edge_count());
        for p in 0..self.vertex_count() as u32 {
            for &q in self.successors(p) {
                fwd.push((p, q));
                mirrored.push((q ^ 1, p ^ 1));
            }
        }
        fwd.sort_unstable();
        mirrored.sort_unstable();
        fwd == mirrored
    }

    /// Tarjan's algorithm, iterative. Components are numbered in the order
    /// they are completed, which lists sinks of the condensation first.
    /// Roots are tried in vertex order x1, x1′, x2, ….
    pub(crate) fn scc(&self) -> Vec<u32> {
        const UNSEEN: u32 = u32::MAX;
        let nv = self.vertex_count();
        let mut index = vec![UNSEEN; nv];
        let mut low = vec![0u32; nv];
        let mut on_stack = vec![false; nv];
        let mut comp = vec![UNSEEN; nv];
        let mut stack: Vec<u32> = Vec::new();
        let mut calls: Vec<(u32, usize)> = Vec::new();
        let mut next_index = 0u32;
        let mut next_comp = 0u32;

        for root in 0..nv as u32 {
            if index[root as usize] != UNSEEN {
                continue;
            }
            calls.push((root, self.offsets[root as usize]));
            index[root as usize] = next_index;
            low[root as usize] = next_index;
            next_index += 1;
            stack.push(root);
            on_stack[root as usize] = true;

            while let Some(top) = calls.last_mut() {
                let v = top.0;
                let vi = v as usize;
                if top.1 < self.offsets[vi + 1] {
                    let w = self.targets[top.1];
                    top.1 += 1;
                    let wi = w as usize;
                    if index[wi] == UNSEEN {
                        index[wi] = next_index;
                        low[wi] = next_index;
                        next_index += 1;
                        stack.push(w);
                        on_stack[wi] = true;
                        calls.push((w, self.offsets[wi]));
                    } else if on_stack[wi] {
                        low[vi] = low[vi].min(index[wi]);
                    }
                    continue;
                }
                calls.pop();
                if let Some(&(parent, _)) = calls.last() {
                    let pi = parent as usize;
                    low[pi] = low[pi].min(low[vi]);
                }
                if low[vi] == index[vi] {
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w as usize] = false;
                        comp[w as usize] = next_comp;
                        if w == v {
                            break;
                        }
                    }
                    next_comp += 1;
                }
            }
        }
        comp
    }
}
