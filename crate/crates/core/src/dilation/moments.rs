use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};
use crate::representation::GraphRep;

/// Index of one mixed moment `(W_left* W_right)[a, b]`; see [`moment_signature`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MomentKey {
    pub left: Vec<String>,
    pub right: Vec<String>,
    pub a: usize,
    pub b: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MomentTable {
    pub entries: BTreeMap<MomentKey, C64>,
}

impl MomentTable {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &MomentKey) -> Option<C64> {
        self.entries.get(key).copied()
    }

    /// Largest entrywise difference, or `None` if the key sets differ.
    pub fn max_difference(&self, other: &MomentTable) -> Option<f64> {
        if self.entries.len() != other.entries.len() {
            return None;
        }
        let mut worst: f64 = 0.0;
        for ((k1, v1), (k2, v2)) in self.entries.iter().zip(&other.entries) {
            if k1 != k2 {
                return None;
            }
            worst = worst.max((v1 - v2).norm());
        }
        Some(worst)
    }
}

/// All words over the edge ids (sorted) of length `0..=max_len`, shortest first.
fn words(ids: &[(String, usize)], max_len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(frontier.len() * ids.len());
        for w in &frontier {
            for (_, e) in ids {
                let mut w2: Vec<usize> = w.clone();
                w2.push(*e);
                next.push(w2);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Mixed moments `(W_u* W_w)[a, b]` for all words `u`, `w` of length at most
/// `max_len`, where `W_w = t(δ_{w_1}) ⋯ t(δ_{w_k}) · seed`.
///
/// `seed` is the isometry embedding the original space. Words are spelled
/// with edge ids, so tables from representations whose edges are listed in
/// different orders are directly comparable.
pub fn moment_signature(rep: &GraphRep, seed: &CMatrix, max_len: usize) -> Result<MomentTable> {
    if seed.nrows() != rep.dim() {
        return Err(Error::Dimension(format!(
            "seed has {} rows, representation acts on C^{}",
            seed.nrows(),
            rep.dim()
        )));
    }
    let graph = rep.graph();
    let mut ids: Vec<(String, usize)> = graph
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| (e.id.clone(), i))
        .collect();
    ids.sort();
    let name = |e: usize| graph.edge(e).id.clone();

    let ws = words(&ids, max_len);
    // W_w for w = (e_1, …, e_k) is t(e_1) W_{(e_2, …, e_k)}; build by prefixing.
    let mut images: Vec<CMatrix> = Vec::with_capacity(ws.len());
    let mut index: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for w in &ws {
        let m = match w.split_first() {
            None => seed.clone(),
            Some((&head, tail)) => rep.edge_op(head) * &images[index[tail]],
        };
        index.insert(w.clone(), images.len());
        images.push(m);
    }

    let mut entries = BTreeMap::new();
    for (u, wu) in ws.iter().zip(&images) {
        let wu_adj = wu.adjoint();
        for (w, ww) in ws.iter().zip(&images) {
            let gram = &wu_adj * ww;
            for a in 0..gram.nrows() {
                for b in 0..gram.ncols() {
                    entries.insert(
                        MomentKey {
                            left: u.iter().map(|&e| name(e)).collect(),
                            right: w.iter().map(|&e| name(e)).collect(),
                            a,
                            b,
                        },
                        gram[(a, b)],
                    );
                }
            }
        }
    }
    Ok(MomentTable { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::DirectedGraph;
    use crate::linalg::real_matrix;
    use std::sync::Arc;

    #[test]
    fn table_size_and_empty_word() {
        let g = Arc::new(DirectedGraph::cuntz(2));
        let rep = GraphRep::zero(g, &[2]).unwrap();
        let seed = CMatrix::identity(2, 2);
        let table = moment_signature(&rep, &seed, 2).unwrap();
        // 1 + 2 + 4 words, squared, times 2x2 entries.
        assert_eq!(table.len(), 49 * 4);
        let key = MomentKey { left: vec![], right: vec![], a: 1, b: 1 };
        assert_eq!(table.get(&key).unwrap().re, 1.0);
    }

    #[test]
    fn words_are_prefixed_in_order() {
        let g = Arc::new(DirectedGraph::cuntz(1));
        let rep = GraphRep::new(g, 1, vec![real_matrix(1, 1, &[1.0])], vec![real_matrix(1, 1, &[0.5])])
            .unwrap();
        let table = moment_signature(&rep, &CMatrix::identity(1, 1), 2).unwrap();
        let key = MomentKey {
            left: vec!["e1".into(), "e1".into()],
            right: vec![],
            a: 0,
            b: 0,
        };
        assert!((table.get(&key).unwrap().re - 0.25).abs() < 1e-15);
        assert_eq!(table.max_difference(&table), Some(0.0));
    }
}
