//! Local field terms, effective-field assembly and energy accounting.
//!
//! Every field is in A/m. Energies are integrated over the sample (J):
//!
//! - exchange: `(A V / Ms²) Σ_edges |M_p - M_q|² / δ²`, the quadratic form of
//!   the 7-point stencil with free boundaries, so `E = -½ μ0 V Σ H_exch·M`;
//! - anisotropy: `Ku V Σ (1 - (M·u)² / Ms²)`;
//! - demag: `-½ μ0 V Σ H_demag·M`;
//! - Zeeman: `-μ0 V Σ H_ext·M`.
//!
//! With these forms `∂E/∂M_c(cell) = -μ0 V H_eff,c(cell)` holds exactly for
//! the discrete system.

use crate::backend::{Backend, Phase, PhaseTimer, Reduction};
use crate::demag::Demag;
use crate::error::{mismatch, Result};
use crate::fft::Precision;
use crate::grid::Grid;
use crate::material::{MaterialParams, MU0};
use crate::state::EnergyBreakdown;
use crate::vec3::{add, dot, scale, sub, Vec3};
use crate::vector_field::VectorField;

/// Exchange field from the 7-point Laplacian with free (Neumann) boundaries.
pub fn exchange_field(
    m: &VectorField,
    a_ex: f64,
    ms: f64,
    backend: &Backend,
    out: &mut VectorField,
) -> Result<()> {
    let g = *m.grid();
    out.check_grid(&g)?;
    let pref = 2.0 * a_ex / (MU0 * ms * ms);
    let inv = [
        1.0 / (g.dx * g.dx),
        1.0 / (g.dy * g.dy),
        1.0 / (g.dz * g.dz),
    ];
    let dims = g.dims();
    let strides = [1, g.nx, g.nx * g.ny];
    backend.map_cells(out, |idx| {
        let (i, j, k) = g.unindex(idx);
        let ijk = [i, j, k];
        let center = m.get(idx);
        let mut lap = [0.0; 3];
        for a in 0..3 {
            let mut acc = [0.0; 3];
            if ijk[a] > 0 {
                acc = add(acc, sub(m.get(idx - strides[a]), center));
            }
            if ijk[a] + 1 < dims[a] {
                acc = add(acc, sub(m.get(idx + strides[a]), center));
            }
            lap = add(lap, scale(acc, inv[a]));
        }
        scale(lap, pref)
    });
    Ok(())
}

/// Uniaxial anisotropy field `(2Ku / (μ0 Ms²)) (M·u) u`.
pub fn anisotropy_field(
    m: &VectorField,
    ku: f64,
    ms: f64,
    easy_axis: Vec3,
    backend: &Backend,
    out: &mut VectorField,
) -> Result<()> {
    out.check_grid(m.grid())?;
    let pref = 2.0 * ku / (MU0 * ms * ms);
    backend.map_cells(out, |idx| {
        scale(easy_axis, pref * dot(m.get(idx), easy_axis))
    });
    Ok(())
}

/// Which contributions enter `H_eff`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TermSet {
    pub exchange: bool,
    pub anisotropy: bool,
    pub demag: bool,
    pub zeeman: bool,
}

impl TermSet {
    pub const ALL: TermSet = TermSet {
        exchange: true,
        anisotropy: true,
        demag: true,
        zeeman: true,
    };
    pub const NONE: TermSet = TermSet {
        exchange: false,
        anisotropy: false,
        demag: false,
        zeeman: false,
    };

    pub fn names(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        if self.exchange {
            v.push("exchange");
        }
        if self.anisotropy {
            v.push("anisotropy");
        }
        if self.demag {
            v.push("demag");
        }
        if self.zeeman {
            v.push("zeeman");
        }
        v
    }
}

/// The individual contributions from the latest evaluation; `None` for disabled terms.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldTerms {
    pub exchange: Option<VectorField>,
    pub anisotropy: Option<VectorField>,
    pub demag: Option<VectorField>,
    pub zeeman: Option<VectorField>,
}

impl FieldTerms {
    fn allocate(grid: Grid, terms: TermSet) -> Self {
        let f = |on: bool| on.then(|| VectorField::zeros(grid));
        Self {
            exchange: f(terms.exchange),
            anisotropy: f(terms.anisotropy),
            demag: f(terms.demag),
            zeeman: f(terms.zeeman),
        }
    }

    fn present(&self) -> impl Iterator<Item = &VectorField> {
        [&self.demag, &self.exchange, &self.anisotropy, &self.zeeman]
            .into_iter()
            .flatten()
    }

    pub fn check_grid(&self, grid: &Grid) -> Result<()> {
        self.present().try_for_each(|f| f.check_grid(grid))
    }

    /// Component-wise sum of the present terms.
    pub fn sum_into(&self, backend: &Backend, out: &mut VectorField) -> Result<()> {
        self.check_grid(out.grid())?;
        let present: Vec<&VectorField> = self.present().collect();
        backend.map_cells(out, |idx| {
            present.iter().fold([0.0; 3], |acc, f| add(acc, f.get(idx)))
        });
        Ok(())
    }
}

/// Applied field, uniform or per-cell.
#[derive(Debug, Clone, PartialEq)]
pub enum ExternalField {
    Uniform(Vec3),
    PerCell(VectorField),
}

impl ExternalField {
    fn expand(&self, grid: Grid) -> Result<VectorField> {
        match self {
            ExternalField::Uniform(v) => Ok(VectorField::uniform(grid, *v)),
            ExternalField::PerCell(f) => {
                f.check_grid(&grid)?;
                Ok(f.clone())
            }
        }
    }
}

/// Produces `H_eff` and energies for a magnetization; the dynamics are
/// written against this interface.
pub trait FieldProvider {
    fn grid(&self) -> &Grid;
    fn params(&self) -> &MaterialParams;
    fn backend(&self) -> &Backend;

    /// Writes `H_eff(m)` into `h_eff`.
    fn effective_field(
        &mut self,
        m: &VectorField,
        h_eff: &mut VectorField,
        timer: Option<&mut PhaseTimer<'_>>,
    ) -> Result<()>;

    /// Energies of `m`, reusing the fields of the latest `effective_field`
    /// call, which must have been made for the same `m`.
    fn energies_of_last(&self, m: &VectorField) -> Result<EnergyBreakdown>;

    /// Energies of `m` with a fresh field evaluation.
    fn energies(&mut self, m: &VectorField) -> Result<EnergyBreakdown> {
        let mut h = VectorField::zeros(*m.grid());
        self.effective_field(m, &mut h, None)?;
        self.energies_of_last(m)
    }
}

/// The full micromagnetic field: demag, exchange, anisotropy and Zeeman.
#[derive(Debug)]
pub struct EffectiveField {
    grid: Grid,
    params: MaterialParams,
    set: TermSet,
    demag: Option<Demag>,
    terms: FieldTerms,
    backend: Backend,
}

impl EffectiveField {
    pub fn new(
        grid: Grid,
        params: MaterialParams,
        set: TermSet,
        external: ExternalField,
        precision: Precision,
        backend: Backend,
    ) -> Result<Self> {
        params.validate()?;
        let demag = if set.demag {
            Some(Demag::new(&grid, precision, &backend)?)
        } else {
            None
        };
        let mut terms = FieldTerms::allocate(grid, set);
        if set.zeeman {
            terms.zeeman = Some(external.expand(grid)?);
        }
        Ok(Self {
            grid,
            params,
            set,
            demag,
            terms,
            backend,
        })
    }

    pub fn term_set(&self) -> TermSet {
        self.set
    }

    pub fn terms(&self) -> &FieldTerms {
        &self.terms
    }

    /// Evaluates every enabled term for `m` without summing.
    pub fn compute_terms(
        &mut self,
        m: &VectorField,
        mut timer: Option<&mut PhaseTimer<'_>>,
    ) -> Result<&FieldTerms> {
        m.check_grid(&self.grid)?;
        let p = self.params;
        if let (Some(d), Some(h)) = (self.demag.as_mut(), self.terms.demag.as_mut()) {
            d.compute(m, h, timer.as_deref_mut())?;
        }
        let mut local = || -> Result<()> {
            if let Some(h) = self.terms.exchange.as_mut() {
                exchange_field(m, p.a_ex, p.ms, &self.backend, h)?;
            }
            if let Some(h) = self.terms.anisotropy.as_mut() {
                anisotropy_field(m, p.ku, p.ms, p.easy_axis, &self.backend, h)?;
            }
            Ok(())
        };
        match timer {
            Some(t) => t.phase(Phase::LocalFields, local)?,
            None => local()?,
        }
        Ok(&self.terms)
    }
}

impl FieldProvider for EffectiveField {
    fn grid(&self) -> &Grid {
        &self.grid
    }

    fn params(&self) -> &MaterialParams {
        &self.params
    }

    fn backend(&self) -> &Backend {
        &self.backend
    }

    fn effective_field(
        &mut self,
        m: &VectorField,
        h_eff: &mut VectorField,
        mut timer: Option<&mut PhaseTimer<'_>>,
    ) -> Result<()> {
        self.compute_terms(m, timer.as_deref_mut())?;
        match timer {
            Some(t) => t.phase(Phase::LocalFields, || {
                self.terms.sum_into(&self.backend, h_eff)
            }),
            None => self.terms.sum_into(&self.backend, h_eff),
        }
    }

    fn energies_of_last(&self, m: &VectorField) -> Result<EnergyBreakdown> {
        energies(m, &self.terms, &self.params, &self.backend)
    }
}

/// Integrated energies of `m` given its field terms.
///
/// Exchange is counted when `terms.exchange` is present, anisotropy when
/// `terms.anisotropy` is present.
pub fn energies(
    m: &VectorField,
    terms: &FieldTerms,
    params: &MaterialParams,
    backend: &Backend,
) -> Result<EnergyBreakdown> {
    let g = *m.grid();
    terms.check_grid(&g)?;
    let v = g.cell_volume();
    let ms2 = params.ms * params.ms;
    let mut scratch = vec![0.0; g.cell_count()];
    let mut total = |kernel: &(dyn Fn(usize) -> f64 + Sync)| -> Result<f64> {
        backend.map_scalar(&mut scratch, kernel);
        backend.reduce_cells(&scratch, Reduction::Sum)
    };

    let exchange = if terms.exchange.is_some() {
        let inv = [
            1.0 / (g.dx * g.dx),
            1.0 / (g.dy * g.dy),
            1.0 / (g.dz * g.dz),
        ];
        let dims = g.dims();
        let strides = [1, g.nx, g.nx * g.ny];
        let sum = total(&|idx| {
            let (i, j, k) = g.unindex(idx);
            let ijk = [i, j, k];
            let c = m.get(idx);
            let mut e = 0.0;
            for a in 0..3 {
                if ijk[a] + 1 < dims[a] {
                    let d = sub(m.get(idx + strides[a]), c);
                    e += dot(d, d) * inv[a];
                }
            }
            e
        })?;
        params.a_ex * v / ms2 * sum
    } else {
        0.0
    };

    let anisotropy = if terms.anisotropy.is_some() {
        let u = params.easy_axis;
        let sum = total(&|idx| {
            let p = dot(m.get(idx), u);
            1.0 - p * p / ms2
        })?;
        params.ku * v * sum
    } else {
        0.0
    };

    let demag = match &terms.demag {
        Some(h) => -0.5 * MU0 * v * total(&|idx| dot(h.get(idx), m.get(idx)))?,
        None => 0.0,
    };

    let zeeman = match &terms.zeeman {
        Some(h) => -MU0 * v * total(&|idx| dot(h.get(idx), m.get(idx)))?,
        None => 0.0,
    };

    Ok(EnergyBreakdown::new(exchange, anisotropy, demag, zeeman))
}

/// Exchange energy in the field form `-½ μ0 V Σ H_exch·M`.
pub fn exchange_energy_from_field(m: &VectorField, h_exch: &VectorField) -> Result<f64> {
    if m.grid() != h_exch.grid() {
        return Err(mismatch(m.grid(), h_exch.grid()));
    }
    let v = m.grid().cell_volume();
    Ok(-0.5
        * MU0
        * v
        * m.iter()
            .zip(h_exch.iter())
            .map(|(a, b)| dot(a, b))
            .sum::<f64>())
}
