use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::profile::{xi_build, CompressionProfile, XiSequence};
use crate::graph::{Tree, TreeCode};
use crate::metric::{CoordinateKey, EmbeddingTable, Norm, SparsePoint};
use crate::{Error, Limits, Result};

/// Injective numbering of tree vertices by integers `>= 2h`, non-decreasing
/// along every branch: level order shifted by `2h`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IndexMap {
    offset: u64,
}

impl IndexMap {
    pub fn index(&self, tree: &Tree, code: &TreeCode) -> Option<u64> {
        tree.index_of(code).map(|i| self.offset + i as u64)
    }

    pub fn offset(&self) -> u64 {
        self.offset
    }
}

pub fn phi_build(tree: &Tree) -> IndexMap {
    IndexMap {
        offset: 2 * tree.height() as u64,
    }
}

/// The map `F_k((n_1..n_l)) = sum_{i=0}^{l} xi_{l-i} e_{(i, Phi(n_1..n_i))}`
/// from `T_h^b` into `l_p`, with disjoint unit coordinates as the basis.
#[derive(Clone, Debug)]
pub struct TreeEmbedding {
    tree: Tree,
    profile: CompressionProfile,
    xi: XiSequence,
    phi: IndexMap,
}

impl TreeEmbedding {
    pub fn new(tree: Tree, profile: CompressionProfile) -> Result<Self> {
        Self::with_limits(tree, profile, &Limits::default())
    }

    pub fn with_limits(tree: Tree, profile: CompressionProfile, limits: &Limits) -> Result<Self> {
        limits.check_vertices(tree.vertex_count() as u128)?;
        let xi = xi_build(&profile, (2 * tree.height()).max(1))?;
        let phi = phi_build(&tree);
        Ok(TreeEmbedding {
            tree,
            profile,
            xi,
            phi,
        })
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn profile(&self) -> &CompressionProfile {
        &self.profile
    }

    pub fn xi(&self) -> &XiSequence {
        &self.xi
    }

    pub fn norm(&self) -> Norm {
        Norm::P(self.profile.p)
    }

    pub fn point(&self, code: &TreeCode) -> Result<SparsePoint> {
        if !self.tree.contains(code) {
            return Err(Error::param(format!("vertex {code} is not in the tree")));
        }
        let l = code.depth();
        let mut point = SparsePoint::zero();
        for i in 0..=l {
            let index = self.phi.index(&self.tree, &code.prefix(i)).expect("prefix in tree");
            point.set(CoordinateKey::new(i as u32, index), self.xi.xi(l - i));
        }
        Ok(point)
    }

    /// Images of all vertices, in level order.
    pub fn points(&self) -> Vec<SparsePoint> {
        self.tree
            .vertices()
            .map(|c| self.point(&c).expect("own vertex"))
            .collect()
    }

    pub fn table(&self) -> Result<EmbeddingTable> {
        let ids = self.tree.vertices().map(|c| c.to_string()).collect();
        EmbeddingTable::new(self.norm(), ids, self.points())
    }

    /// The table with every nonzero coordinate moved by uniform noise in
    /// `[-eps, eps]`.
    pub fn perturbed_table(&self, eps: f64, seed: u64) -> Result<EmbeddingTable> {
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(Error::param("perturbation size must be non-negative"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut table = self.table()?;
        for point in &mut table.points {
            let entries: Vec<_> = point.iter().collect();
            for (k, v) in entries {
                let noise = if eps > 0.0 { rng.gen_range(-eps..=eps) } else { 0.0 };
                point.set(k, v + noise);
            }
        }
        Ok(table)
    }

    /// `||F(x) - F(y)||_p` from the closed form: with `s` the common prefix
    /// length and `n`, `m` the branch lengths,
    /// `sum_{i<=s} |xi_{s+n-i} - xi_{s+m-i}|^p + sum_{i=1}^{n} xi_{n-i}^p
    /// + sum_{i=1}^{m} xi_{m-i}^p`.
    pub fn exact_pair_distance(&self, x: &TreeCode, y: &TreeCode) -> f64 {
        let p = self.profile.p;
        let xi = |i: usize| self.xi.xi(i);
        let s = x.common_prefix_len(y);
        let n = x.depth() - s;
        let m = y.depth() - s;
        let shared: f64 = (0..=s)
            .map(|i| (xi(s + n - i) - xi(s + m - i)).abs().powf(p))
            .sum();
        let own = |len: usize| (1..=len).map(|i| xi(len - i).powf(p)).sum::<f64>();
        (shared + own(n) + own(m)).powf(1.0 / p)
    }

    /// `(sum_{i<len} xi_i^p)^{1/p}`.
    pub fn branch_mass(&self, len: usize) -> f64 {
        let p = self.profile.p;
        (0..len).map(|i| self.xi.xi(i).powf(p)).sum::<f64>().powf(1.0 / p)
    }
}
