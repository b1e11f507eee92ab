// SPDX-License-Identifier: Apache-2.0

//! Union-find with a parity bit on every element relative to its root.

/// Disjoint sets where each element carries a parity relative to its set's
/// root, so that the relation "x and y differ by parity p" can be merged and
/// checked for contradictions.
#[derive(Clone, Debug)]
pub struct ParityUnionFind {
    parent: Vec<u32>,
    /// Parity to parent.
    parity: Vec<bool>,
    size: Vec<u32>,
    path: Vec<u32>,
}

/// A constraint that contradicts the ones merged before it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParityConflict {
    pub a: usize,
    pub b: usize,
}

impl ParityUnionFind {
    pub fn new(n: usize) -> Self {
        ParityUnionFind {
            parent: (0..n as u32).collect(),
            parity: vec![false; n],
            size: vec![1; n],
            path: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// Root of `x` and the parity of `x` relative to it. Compresses the path.
    pub fn find(&mut self, x: usize) -> (usize, bool) {
        let mut cur = x as u32;
        self.path.clear();
        while self.parent[cur as usize] != cur {
            self.path.push(cur);
            cur = self.parent[cur as usize];
        }
        let root = cur;
        // Walk back from the node nearest the root, accumulating parity.
        let mut acc = false;
        for &node in self.path.iter().rev() {
            acc ^= self.parity[node as usize];
            self.parity[node as usize] = acc;
            self.parent[node as usize] = root;
        }
        (root as usize, if x as u32 == root { false } else { self.parity[x] })
    }

    /// Records `parity(a) xor parity(b) == odd`.
    ///
    /// Returns `Ok(true)` if two sets were merged, `Ok(false)` if the
    /// constraint was already implied, and `Err` if it contradicts.
    pub fn relate(&mut self, a: usize, b: usize, odd: bool) -> Result<bool, ParityConflict> {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        if ra == rb {
            return if pa ^ pb == odd {
                Ok(false)
            } else {
                Err(ParityConflict { a, b })
            };
        }
        let (big, small) = if self.size[ra] >= self.size[rb] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[small] = big as u32;
        self.parity[small] = pa ^ pb ^ odd;
        self.size[big] += self.size[small];
        Ok(true)
    }

    pub fn same_set(&mut self, a: usize, b: usize) -> bool {
        self.find(a).0 == self.find(b).0
    }
}
