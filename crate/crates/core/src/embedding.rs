//! Fragment / bath / core / virtual partition of the mean-field density.
//!
//! The environment block `D_B` of the LO density is diagonalized. Its
//! eigenvectors with fractional occupation form the bath, which together with
//! the fragment orbitals spans the impurity. The rest are doubly occupied
//! (core) or empty (virtual) to within `delta`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::integrals::IntegralSet;
use crate::linalg::{hcat, sym_eigen};
use crate::projection::{build_subspace_hamiltonian, SubspaceHamiltonian};

pub const DEFAULT_DELTA: f64 = 1e-6;

/// Fragment orbitals as indices into the LO basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FragmentSpec {
    indices: Vec<usize>,
}

impl FragmentSpec {
    pub fn new(indices: Vec<usize>, n_orb: usize) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidInput("fragment is empty".into()));
        }
        let mut seen = vec![false; n_orb];
        for &i in &indices {
            if i >= n_orb {
                return Err(Error::InvalidInput(format!(
                    "fragment index {i} out of range for {n_orb} orbitals"
                )));
            }
            if seen[i] {
                return Err(Error::InvalidInput(format!("duplicate fragment index {i}")));
            }
            seen[i] = true;
        }
        Ok(Self { indices })
    }

    /// Every orbital is in the fragment.
    pub fn all(n_orb: usize) -> Self {
        Self {
            indices: (0..n_orb).collect(),
        }
    }

    /// Parse a comma-separated list such as `"2,3"`, or `"all"`.
    pub fn parse(text: &str, n_orb: usize) -> Result<Self> {
        let text = text.trim();
        if text.eq_ignore_ascii_case("all") {
            return Ok(Self::all(n_orb));
        }
        let indices = text
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidInput(format!("bad fragment index '{t}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(indices, n_orb)
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Environment LO indices in ascending order.
    pub fn complement(&self, n_orb: usize) -> Vec<usize> {
        (0..n_orb).filter(|i| !self.indices.contains(i)).collect()
    }

    fn check(&self, n_orb: usize) -> Result<()> {
        Self::new(self.indices.clone(), n_orb).map(|_| ())
    }
}

/// Density blocks after moving the fragment rows and columns to the front.
#[derive(Clone, Debug)]
pub struct DensityPartition {
    pub d_a: DMatrix<f64>,
    pub d_inter: DMatrix<f64>,
    pub d_b: DMatrix<f64>,
    /// Original LO index of each environment position.
    pub env_index_map: Vec<usize>,
}

pub fn partition_density(d: &DMatrix<f64>, frag: &FragmentSpec) -> Result<DensityPartition> {
    let n = d.nrows();
    if d.ncols() != n {
        return Err(Error::Dimension(format!("density is {}x{}", n, d.ncols())));
    }
    frag.check(n)?;
    let fi = frag.indices();
    let env = frag.complement(n);
    let gather = |rows: &[usize], cols: &[usize]| {
        DMatrix::from_fn(rows.len(), cols.len(), |i, j| d[(rows[i], cols[j])])
    };
    Ok(DensityPartition {
        d_a: gather(fi, fi),
        d_inter: gather(fi, &env),
        d_b: gather(&env, &env),
        env_index_map: env,
    })
}

/// LO → UEO rotation split by orbital class.
#[derive(Clone, Debug)]
pub struct EmbeddingBasis {
    pub fragment: FragmentSpec,
    pub u_frag: DMatrix<f64>,
    pub u_bath: DMatrix<f64>,
    pub u_core: DMatrix<f64>,
    pub u_vir: DMatrix<f64>,
    /// Environment eigenvalues in column order: bath, then core, then virtual.
    pub occ_env: Vec<f64>,
    pub delta: f64,
    /// The density the partition was built from.
    pub density: DMatrix<f64>,
}

impl EmbeddingBasis {
    pub fn n_orb(&self) -> usize {
        self.density.nrows()
    }

    pub fn n_frag(&self) -> usize {
        self.u_frag.ncols()
    }

    pub fn n_bath(&self) -> usize {
        self.u_bath.ncols()
    }

    pub fn n_core(&self) -> usize {
        self.u_core.ncols()
    }

    pub fn n_vir(&self) -> usize {
        self.u_vir.ncols()
    }

    pub fn n_impurity(&self) -> usize {
        self.n_frag() + self.n_bath()
    }

    /// `[U_frag | U_bath]`.
    pub fn impurity_columns(&self) -> DMatrix<f64> {
        hcat(&[&self.u_frag, &self.u_bath], self.n_orb())
    }

    /// `[U_frag | U_bath | U_core | U_vir]`.
    pub fn full_rotation(&self) -> DMatrix<f64> {
        hcat(
            &[&self.u_frag, &self.u_bath, &self.u_core, &self.u_vir],
            self.n_orb(),
        )
    }

    /// Electron count on the impurity, `Tr(C_impᵀ D C_imp)`.
    pub fn impurity_electrons(&self) -> f64 {
        let c = self.impurity_columns();
        (c.transpose() * &self.density * &c).trace()
    }
}

struct EnvVector {
    lambda: f64,
    overlap: f64,
    anchor: usize,
    column: DMatrix<f64>,
}

pub fn build_bath(d: &DMatrix<f64>, frag: &FragmentSpec, delta: f64) -> Result<EmbeddingBasis> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidInput(format!("delta must lie in (0, 1), got {delta}")));
    }
    let part = partition_density(d, frag)?;
    let n = d.nrows();
    let n_env = part.env_index_map.len();

    let mut u_frag = DMatrix::zeros(n, frag.len());
    for (col, &i) in frag.indices().iter().enumerate() {
        u_frag[(i, col)] = 1.0;
    }

    let (lams, vecs) = sym_eigen(&part.d_b);
    let mut bath = Vec::new();
    let mut core = Vec::new();
    let mut vir = Vec::new();
    for j in 0..n_env {
        let v = vecs.column(j);
        let mut column = DMatrix::zeros(n, 1);
        let mut anchor = 0;
        let mut best = -1.0;
        for (pos, &lo) in part.env_index_map.iter().enumerate() {
            column[(lo, 0)] = v[pos];
            if v[pos].abs() > best + 1e-12 {
                best = v[pos].abs();
                anchor = lo;
            }
        }
        let overlap = (&part.d_inter * v).norm();
        let ev = EnvVector {
            lambda: lams[j].clamp(0.0, 2.0),
            overlap,
            anchor,
            column,
        };
        if lams[j] >= 2.0 - delta {
            core.push(ev);
        } else if lams[j] <= delta {
            vir.push(ev);
        } else {
            bath.push(ev);
        }
    }

    let order = |xs: &mut Vec<EnvVector>| {
        xs.sort_by(|a, b| {
            let dl = b.lambda - a.lambda;
            if dl.abs() > 1e-10 {
                return dl.partial_cmp(&0.0).unwrap();
            }
            let dov = b.overlap - a.overlap;
            if dov.abs() > 1e-10 {
                return dov.partial_cmp(&0.0).unwrap();
            }
            a.anchor.cmp(&b.anchor)
        });
    };
    order(&mut bath);
    order(&mut core);
    order(&mut vir);

    if bath.len() > frag.len() {
        log::warn!(
            "{} fractional environment orbitals exceed the fragment size {}",
            bath.len(),
            frag.len()
        );
    }

    let stack = |xs: &[EnvVector]| {
        let cols: Vec<&DMatrix<f64>> = xs.iter().map(|e| &e.column).collect();
        hcat(&cols, n)
    };
    let occ_env = bath
        .iter()
        .chain(&core)
        .chain(&vir)
        .map(|e| e.lambda)
        .collect();
    Ok(EmbeddingBasis {
        fragment: frag.clone(),
        u_frag,
        u_bath: stack(&bath),
        u_core: stack(&core),
        u_vir: stack(&vir),
        occ_env,
        delta,
        density: d.clone(),
    })
}

/// `H_sub(0)` over `[U_frag | U_bath]` with the core frozen.
pub fn impurity_hamiltonian(ints: &IntegralSet, b: &EmbeddingBasis) -> Result<SubspaceHamiltonian> {
    if b.n_orb() != ints.n_orb {
        return Err(Error::Dimension(format!(
            "embedding over {} orbitals, integrals over {}",
            b.n_orb(),
            ints.n_orb
        )));
    }
    let n_elec_sub = ints
        .n_elec
        .checked_sub(2 * b.n_core())
        .ok_or_else(|| Error::InvalidInput("more core orbitals than electron pairs".into()))?;
    build_subspace_hamiltonian(ints, &b.impurity_columns(), &b.u_core, n_elec_sub)
}
