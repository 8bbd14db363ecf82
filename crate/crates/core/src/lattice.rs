//! The torus `R^n / Lambda` in lattice coordinates, its dual lattice and the
//! numeric shell enumeration used by the oracle.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::intmat::{self, IntMatrix};

pub const DEFAULT_PRECISION: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct TorusLattice {
    pub rank: usize,
    /// Columns are the lattice basis vectors in ambient orthonormal coordinates.
    pub embedding: Option<DMatrix<f64>>,
    pub embedding_precision: f64,
}

/// Coordinates in the basis of the dual lattice dual to the lattice basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DualVector {
    pub coords: Vec<i64>,
}

impl DualVector {
    pub fn neg(&self) -> DualVector {
        DualVector {
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }
}

#[derive(Debug, Clone)]
pub struct Shell {
    pub norm: f64,
    pub vectors: Vec<DualVector>,
}

impl TorusLattice {
    /// The standard lattice `Z^rank` with the identity embedding.
    pub fn standard(rank: usize) -> Self {
        TorusLattice {
            rank,
            embedding: Some(DMatrix::identity(rank, rank)),
            embedding_precision: DEFAULT_PRECISION,
        }
    }

    pub fn new(rank: usize, embedding: Option<DMatrix<f64>>, precision: f64) -> Result<Self> {
        if !(6..=7).contains(&rank) {
            return Err(Error::ValidationError(format!("lattice rank {rank} not in {{6, 7}}")));
        }
        if precision <= 0.0 {
            return Err(Error::ValidationError("embedding precision must be positive".into()));
        }
        if let Some(e) = &embedding {
            if e.shape() != (rank, rank) {
                return Err(Error::ValidationError(format!(
                    "embedding is {:?}, expected {rank}x{rank}",
                    e.shape()
                )));
            }
            if e.determinant().abs() <= precision {
                return Err(Error::ValidationError("embedding columns are dependent".into()));
            }
        }
        Ok(TorusLattice {
            rank,
            embedding,
            embedding_precision: precision,
        })
    }

    pub fn embedding(&self) -> Result<&DMatrix<f64>> {
        self.embedding.as_ref().ok_or(Error::MissingEmbedding)
    }

    /// Ambient coordinates of a dual lattice vector (rows of the inverse embedding).
    pub fn dual_ambient(&self, u: &DualVector) -> Result<DVector<f64>> {
        let inv_t = self.dual_embedding()?;
        let c = DVector::from_iterator(u.coords.len(), u.coords.iter().map(|&x| x as f64));
        Ok(inv_t * c)
    }

    /// Columns are the dual basis vectors in ambient coordinates.
    pub fn dual_embedding(&self) -> Result<DMatrix<f64>> {
        let e = self.embedding()?;
        let inv = e.clone().try_inverse().ok_or(Error::MissingEmbedding)?;
        Ok(inv.transpose())
    }

    /// Linear part in ambient coordinates: `E B E^-1`.
    pub fn ambient_linear(&self, b: &IntMatrix) -> Result<DMatrix<f64>> {
        let e = self.embedding()?;
        let inv = e.clone().try_inverse().ok_or(Error::MissingEmbedding)?;
        Ok(e * b.map(|x| x as f64) * inv)
    }
}

/// A Z-basis of the dual vectors fixed by the dual action of `b`, i.e. of `ker(B^T - I)`.
pub fn fixed_dual_sublattice(b: &IntMatrix) -> Vec<DualVector> {
    let n = b.nrows();
    let m = b.transpose() - intmat::identity(n);
    let k = intmat::integer_kernel(&m);
    k.column_iter()
        .map(|c| DualVector {
            coords: c.iter().copied().collect(),
        })
        .collect()
}

/// All nonzero `b`-fixed dual vectors of ambient norm at most `max_norm`,
/// grouped into shells of equal norm and sorted by norm.
pub fn enumerate_dual_shells(
    lattice: &TorusLattice,
    b: &IntMatrix,
    max_norm: f64,
) -> Result<Vec<Shell>> {
    let dual = lattice.dual_embedding()?;
    let basis = fixed_dual_sublattice(b);
    let k = basis.len();
    if k == 0 || max_norm <= 0.0 {
        return Ok(vec![]);
    }
    let n = lattice.rank;
    let kmat = DMatrix::from_fn(n, k, |i, j| basis[j].coords[i] as f64);
    let amb = &dual * &kmat;
    let gram = amb.transpose() * &amb;
    let ginv = gram.clone().try_inverse().ok_or(Error::MissingEmbedding)?;
    let bounds: Vec<i64> = (0..k)
        .map(|i| (max_norm * ginv[(i, i)].sqrt() + 1e-9).floor() as i64)
        .collect();

    let tol = lattice.embedding_precision;
    let mut found: Vec<(f64, DualVector)> = Vec::new();
    let mut c: Vec<i64> = bounds.iter().map(|b| -b).collect();
    loop {
        if c.iter().any(|&x| x != 0) {
            let cv = DVector::from_iterator(k, c.iter().map(|&x| x as f64));
            let norm = (&amb * cv).norm();
            if norm <= max_norm + tol {
                let coords = (0..n)
                    .map(|i| (0..k).map(|j| basis[j].coords[i] * c[j]).sum())
                    .collect();
                found.push((norm, DualVector { coords }));
            }
        }
        // odometer increment
        let mut i = 0;
        while i < k {
            if c[i] < bounds[i] {
                c[i] += 1;
                break;
            }
            c[i] = -bounds[i];
            i += 1;
        }
        if i == k {
            break;
        }
    }
    found.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    let mut shells: Vec<Shell> = Vec::new();
    for (norm, v) in found {
        match shells.last_mut() {
            Some(s) if (norm - s.norm).abs() <= tol => s.vectors.push(v),
            _ => shells.push(Shell {
                norm,
                vectors: vec![v],
            }),
        }
    }
    Ok(shells)
}

/// The first `count` shells of `b`-fixed dual vectors, growing the search radius as needed.
pub fn first_dual_shells(lattice: &TorusLattice, b: &IntMatrix, count: usize) -> Result<Vec<Shell>> {
    lattice.embedding()?;
    if fixed_dual_sublattice(b).is_empty() || count == 0 {
        return Ok(vec![]);
    }
    let mut radius = 1.0;
    loop {
        let shells = enumerate_dual_shells(lattice, b, radius)?;
        if shells.len() > count {
            return Ok(shells.into_iter().take(count).collect());
        }
        radius *= 1.5;
    }
}
