use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::grid::GridSpec;

/// Faces `[i0, i1) x [j0, j1)` (lower-left vertex indices) removed from the
/// complex, together with the edges and vertices strictly inside them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Hole {
    pub i0: usize,
    pub j0: usize,
    pub i1: usize,
    pub j1: usize,
}

/// Cubical complex of a `nx x ny` vertex grid. Edges point along +x or +y,
/// faces are oriented by +z (counterclockwise boundary).
///
/// Cell numbering: vertices `i + nx j`; x-edges `i + (nx-1) j` followed by
/// y-edges `i + nx j`; faces `i + (nx-1) j`.
#[derive(Clone, Debug, PartialEq)]
pub struct CubicalComplex {
    pub grid: GridSpec,
    nx: usize,
    ny: usize,
    hole: Option<Hole>,
}

/// Integer combination of p-cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    pub degree: usize,
    coefficients: BTreeMap<usize, i64>,
}

impl Chain {
    pub fn zero(degree: usize) -> Self {
        Chain {
            degree,
            coefficients: BTreeMap::new(),
        }
    }

    pub fn cell(degree: usize, index: usize) -> Self {
        let mut c = Chain::zero(degree);
        c.add_cell(index, 1);
        c
    }

    pub fn from_cells(degree: usize, cells: impl IntoIterator<Item = (usize, i64)>) -> Self {
        let mut c = Chain::zero(degree);
        for (idx, coeff) in cells {
            c.add_cell(idx, coeff);
        }
        c
    }

    pub fn add_cell(&mut self, index: usize, coeff: i64) {
        let e = self.coefficients.entry(index).or_insert(0);
        *e += coeff;
        if *e == 0 {
            self.coefficients.remove(&index);
        }
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: i64, other: &Chain, b: i64) -> Result<Chain> {
        if self.degree != other.degree {
            return Err(Error::Degree(format!(
                "cannot add a {}-chain and a {}-chain",
                self.degree, other.degree
            )));
        }
        let mut out = Chain::zero(self.degree);
        for (&i, &c) in &self.coefficients {
            out.add_cell(i, a * c);
        }
        for (&i, &c) in &other.coefficients {
            out.add_cell(i, b * c);
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn coefficient(&self, index: usize) -> i64 {
        self.coefficients.get(&index).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.coefficients.iter().map(|(&i, &c)| (i, c))
    }

    pub fn support_len(&self) -> usize {
        self.coefficients.len()
    }
}

/// Real value per p-cell; for 1-forms the value is the integral along the edge.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteForm {
    pub degree: usize,
    pub values: Vec<f64>,
}

impl CubicalComplex {
    pub fn new(grid: GridSpec) -> Result<Self> {
        grid.validate()?;
        if grid.dims[2] != 1 {
            return Err(Error::InvalidGrid("cubical complexes are planar (nz = 1)".into()));
        }
        if grid.dims[0] < 2 || grid.dims[1] < 2 {
            return Err(Error::InvalidGrid("need at least 2x2 vertices".into()));
        }
        Ok(CubicalComplex {
            grid,
            nx: grid.dims[0],
            ny: grid.dims[1],
            hole: None,
        })
    }

    pub fn with_hole(mut self, hole: Hole) -> Result<Self> {
        if hole.i0 >= hole.i1 || hole.j0 >= hole.j1 || hole.i1 > self.nx - 1 || hole.j1 > self.ny - 1 {
            return Err(Error::InvalidGrid(format!("hole {hole:?} does not fit the complex")));
        }
        self.hole = Some(hole);
        Ok(self)
    }

    pub fn hole(&self) -> Option<Hole> {
        self.hole
    }

    pub fn cell_count(&self, degree: usize) -> usize {
        let (nx, ny) = (self.nx, self.ny);
        match degree {
            0 => nx * ny,
            1 => (nx - 1) * ny + nx * (ny - 1),
            2 => (nx - 1) * (ny - 1),
            _ => 0,
        }
    }

    pub fn vertex(&self, i: usize, j: usize) -> usize {
        i + self.nx * j
    }

    pub fn x_edge(&self, i: usize, j: usize) -> usize {
        i + (self.nx - 1) * j
    }

    pub fn y_edge(&self, i: usize, j: usize) -> usize {
        (self.nx - 1) * self.ny + i + self.nx * j
    }

    pub fn face(&self, i: usize, j: usize) -> usize {
        i + (self.nx - 1) * j
    }

    /// Endpoints `(tail, head)` of an edge as vertex indices `(i, j)`.
    pub fn edge_vertices(&self, e: usize) -> ([usize; 2], [usize; 2]) {
        let nxe = (self.nx - 1) * self.ny;
        if e < nxe {
            let (i, j) = (e % (self.nx - 1), e / (self.nx - 1));
            ([i, j], [i + 1, j])
        } else {
            let r = e - nxe;
            let (i, j) = (r % self.nx, r / self.nx);
            ([i, j], [i, j + 1])
        }
    }

    /// Whether a cell belongs to the complex (is not inside the hole).
    pub fn is_active(&self, degree: usize, index: usize) -> bool {
        let Some(h) = self.hole else {
            return index < self.cell_count(degree);
        };
        let inside = |lo: usize, hi: usize, v: usize, open: bool| {
            if open {
                lo < v && v < hi
            } else {
                lo <= v && v < hi
            }
        };
        match degree {
            0 => {
                let (i, j) = (index % self.nx, index / self.nx);
                !(inside(h.i0, h.i1, i, true) && inside(h.j0, h.j1, j, true))
            }
            1 => {
                let ([i, j], [hi, hj]) = self.edge_vertices(index);
                if hj == j {
                    let _ = hi;
                    !(inside(h.i0, h.i1, i, false) && inside(h.j0, h.j1, j, true))
                } else {
                    !(inside(h.i0, h.i1, i, true) && inside(h.j0, h.j1, j, false))
                }
            }
            2 => {
                let (i, j) = (index % (self.nx - 1), index / (self.nx - 1));
                !(inside(h.i0, h.i1, i, false) && inside(h.j0, h.j1, j, false))
            }
            _ => false,
        }
    }

    fn check_chain(&self, chain: &Chain) -> Result<()> {
        if chain.degree > 2 {
            return Err(Error::Degree(format!("no {}-cells in a planar complex", chain.degree)));
        }
        for (idx, _) in chain.iter() {
            if !self.is_active(chain.degree, idx) {
                return Err(Error::Degree(format!(
                    "{}-cell {idx} is not in the complex",
                    chain.degree
                )));
            }
        }
        Ok(())
    }

    fn check_form(&self, form: &DiscreteForm) -> Result<()> {
        if form.degree > 2 || form.values.len() != self.cell_count(form.degree) {
            return Err(Error::Degree(format!(
                "{}-form has {} values for {} cells",
                form.degree,
                form.values.len(),
                self.cell_count(form.degree)
            )));
        }
        Ok(())
    }

    fn cell_boundary(&self, degree: usize, index: usize) -> Vec<(usize, i64)> {
        match degree {
            1 => {
                let (t, h) = self.edge_vertices(index);
                vec![(self.vertex(h[0], h[1]), 1), (self.vertex(t[0], t[1]), -1)]
            }
            2 => {
                let (i, j) = (index % (self.nx - 1), index / (self.nx - 1));
                vec![
                    (self.x_edge(i, j), 1),
                    (self.y_edge(i + 1, j), 1),
                    (self.x_edge(i, j + 1), -1),
                    (self.y_edge(i, j), -1),
                ]
            }
            _ => Vec::new(),
        }
    }

    pub fn boundary(&self, chain: &Chain) -> Result<Chain> {
        if chain.degree == 0 {
            return Err(Error::Degree("0-chains have no boundary".into()));
        }
        self.check_chain(chain)?;
        let mut out = Chain::zero(chain.degree - 1);
        for (idx, coeff) in chain.iter() {
            for (b, sign) in self.cell_boundary(chain.degree, idx) {
                out.add_cell(b, sign * coeff);
            }
        }
        Ok(out)
    }

    /// `(d form)(c) = form(boundary c)` on every active (p+1)-cell; inactive cells get 0.
    pub fn coboundary(&self, form: &DiscreteForm) -> Result<DiscreteForm> {
        self.check_form(form)?;
        if form.degree >= 2 {
            return Err(Error::Degree("2-forms have no coboundary in a planar complex".into()));
        }
        let degree = form.degree + 1;
        let values = (0..self.cell_count(degree))
            .map(|c| {
                if !self.is_active(degree, c) {
                    return 0.0;
                }
                self.cell_boundary(degree, c)
                    .into_iter()
                    .map(|(b, sign)| sign as f64 * form.values[b])
                    .sum()
            })
            .collect();
        Ok(DiscreteForm { degree, values })
    }

    pub fn evaluate(&self, form: &DiscreteForm, chain: &Chain) -> Result<f64> {
        self.check_form(form)?;
        if form.degree != chain.degree {
            return Err(Error::Degree(format!(
                "cannot evaluate a {}-form on a {}-chain",
                form.degree, chain.degree
            )));
        }
        self.check_chain(chain)?;
        Ok(chain.iter().map(|(idx, c)| c as f64 * form.values[idx]).sum())
    }

    /// `<d form, chain> - <form, boundary chain>`.
    pub fn stokes_residual(&self, form: &DiscreteForm, chain: &Chain) -> Result<f64> {
        if chain.degree != form.degree + 1 {
            return Err(Error::Degree(format!(
                "Stokes pairing needs a {}-chain for a {}-form",
                form.degree + 1,
                form.degree
            )));
        }
        let d = self.coboundary(form)?;
        Ok(self.evaluate(&d, chain)? - self.evaluate(form, &self.boundary(chain)?)?)
    }

    pub fn vertex_position(&self, i: usize, j: usize) -> [f64; 2] {
        let p = self.grid.position(i, j, 0);
        [p[0], p[1]]
    }

    /// 0-form sampled from a function of position.
    pub fn zero_form(&self, f: impl Fn([f64; 2]) -> f64) -> DiscreteForm {
        let values = (0..self.cell_count(0))
            .map(|v| self.vertex_position(v % self.nx, v / self.nx))
            .map(f)
            .collect();
        DiscreteForm { degree: 0, values }
    }

    /// 1-form whose value on each active edge is `integral(tail, head)`; inactive edges get 0.
    pub fn edge_integrated(&self, integral: impl Fn([f64; 2], [f64; 2]) -> f64) -> DiscreteForm {
        let values = (0..self.cell_count(1))
            .map(|e| {
                if !self.is_active(1, e) {
                    return 0.0;
                }
                let (t, h) = self.edge_vertices(e);
                integral(self.vertex_position(t[0], t[1]), self.vertex_position(h[0], h[1]))
            })
            .collect();
        DiscreteForm { degree: 1, values }
    }

    /// Counterclockwise 1-cycle around the hole.
    pub fn hole_cycle(&self) -> Result<Chain> {
        let h = self
            .hole
            .ok_or_else(|| Error::NoCycle("the complex has no hole".into()))?;
        if h.i0 == 0 || h.j0 == 0 || h.i1 >= self.nx - 1 || h.j1 >= self.ny - 1 {
            return Err(Error::NoCycle("the hole touches the outer boundary".into()));
        }
        let mut cycle = Chain::zero(1);
        for j in h.j0..h.j1 {
            for i in h.i0..h.i1 {
                for (b, sign) in self.cell_boundary(2, self.face(i, j)) {
                    cycle.add_cell(b, sign);
                }
            }
        }
        Ok(cycle)
    }

    /// `(is_closed, period)`: closedness over all active faces and the period around the hole.
    pub fn closed_not_exact_witness(&self, form: &DiscreteForm) -> Result<(bool, f64)> {
        if form.degree != 1 {
            return Err(Error::Degree("the witness needs a 1-form".into()));
        }
        let cycle = self.hole_cycle()?;
        let d = self.coboundary(form)?;
        let max_curl = d.values.iter().map(|v| v.abs()).fold(0.0, f64::max);
        Ok((max_curl <= 1e-10, self.evaluate(form, &cycle)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::wrap_angle;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn complex(nx: usize, ny: usize) -> CubicalComplex {
        CubicalComplex::new(GridSpec::centered([nx, ny, 1], [0.5, 0.5, 1.0], [0.0; 3]).unwrap()).unwrap()
    }

    #[test]
    fn cell_counts() {
        let c = complex(4, 3);
        assert_eq!(c.cell_count(0), 12);
        assert_eq!(c.cell_count(1), 3 * 3 + 4 * 2);
        assert_eq!(c.cell_count(2), 6);
    }

    #[test]
    fn face_boundary_is_counterclockwise_loop() {
        let c = complex(3, 3);
        let b = c.boundary(&Chain::cell(2, c.face(0, 0))).unwrap();
        assert_eq!(b.support_len(), 4);
        assert_eq!(b.coefficient(c.x_edge(0, 0)), 1);
        assert_eq!(b.coefficient(c.y_edge(1, 0)), 1);
        assert_eq!(b.coefficient(c.x_edge(0, 1)), -1);
        assert_eq!(b.coefficient(c.y_edge(0, 0)), -1);
        assert!(c.boundary(&b).unwrap().is_zero());
    }

    #[test]
    fn block_boundary_cancels_interior_edges() {
        let c = complex(4, 4);
        let block = Chain::from_cells(2, [(c.face(1, 1), 1), (c.face(2, 1), 1), (c.face(1, 2), 1), (c.face(2, 2), 1)]);
        let b = c.boundary(&block).unwrap();
        // oracle: an edge survives iff exactly one adjacent block face contains it
        assert_eq!(b.support_len(), 8);
        assert_eq!(b.coefficient(c.x_edge(1, 2)), 0);
        assert_eq!(b.coefficient(c.y_edge(2, 1)), 0);
        assert_eq!(b.coefficient(c.x_edge(1, 1)), 1);
        assert_eq!(b.coefficient(c.x_edge(2, 3)), -1);
        assert!(c.boundary(&Chain::zero(0)).is_err());
    }

    #[test]
    fn coboundary_examples() {
        let c = complex(5, 4);
        let constant = c.zero_form(|_| 3.0);
        assert!(c.coboundary(&constant).unwrap().values.iter().all(|&v| v == 0.0));
        let x = c.zero_form(|p| p[0]);
        let dx = c.coboundary(&x).unwrap();
        for e in 0..c.cell_count(1) {
            let (t, h) = c.edge_vertices(e);
            let expect = if t[1] == h[1] { 0.5 } else { 0.0 };
            assert_eq!(dx.values[e], expect);
        }
        let dd = c.coboundary(&dx).unwrap();
        assert!(dd.values.iter().all(|&v| v == 0.0));
        assert!(c.coboundary(&DiscreteForm { degree: 2, values: vec![0.0; 12] }).is_err());
    }

    #[test]
    fn evaluate_basics() {
        let c = complex(3, 3);
        let form = DiscreteForm { degree: 1, values: (0..12).map(|v| v as f64).collect() };
        assert_eq!(c.evaluate(&form, &Chain::zero(1)).unwrap(), 0.0);
        assert_eq!(c.evaluate(&form, &Chain::cell(1, 5)).unwrap(), 5.0);
        let c1 = Chain::from_cells(1, [(1, 2), (3, -1)]);
        let c2 = Chain::from_cells(1, [(3, 4), (7, 1)]);
        let lhs = c.evaluate(&form, &c1.combine(3, &c2, -2).unwrap()).unwrap();
        let rhs = 3.0 * c.evaluate(&form, &c1).unwrap() - 2.0 * c.evaluate(&form, &c2).unwrap();
        assert_eq!(lhs, rhs);
        assert!(c.evaluate(&form, &Chain::zero(2)).is_err());
    }

    fn annulus() -> CubicalComplex {
        CubicalComplex::new(GridSpec::centered([12, 12, 1], [0.25, 0.25, 1.0], [0.0; 3]).unwrap())
            .unwrap()
            .with_hole(Hole { i0: 4, j0: 4, i1: 7, j1: 7 })
            .unwrap()
    }

    #[test]
    fn angle_form_on_annulus_is_closed_with_period_two_pi() {
        let c = annulus();
        // dtheta integrated exactly along a straight edge not through the origin
        let dtheta = c.edge_integrated(|a, b| wrap_angle(b[1].atan2(b[0]) - a[1].atan2(a[0])));
        let (closed, period) = c.closed_not_exact_witness(&dtheta).unwrap();
        assert!(closed);
        assert!((period - 2.0 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn exact_form_has_zero_period() {
        let c = annulus();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = DiscreteForm { degree: 0, values: (0..c.cell_count(0)).map(|_| rng.gen_range(-1.0..1.0)).collect() };
        let (closed, period) = c.closed_not_exact_witness(&c.coboundary(&f).unwrap()).unwrap();
        assert!(closed);
        assert!(period.abs() < 1e-12);
    }

    #[test]
    fn random_one_form_is_not_closed() {
        let c = annulus();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let w = DiscreteForm { degree: 1, values: (0..c.cell_count(1)).map(|_| rng.gen_range(-1.0..1.0)).collect() };
            let d = c.coboundary(&w).unwrap();
            assert!(d.values.iter().map(|v| v.abs()).fold(0.0, f64::max) > 1e-6);
            assert!(!c.closed_not_exact_witness(&w).unwrap().0);
        }
    }

    #[test]
    fn no_hole_means_no_cycle() {
        let c = complex(5, 5);
        assert!(matches!(c.closed_not_exact_witness(&c.edge_integrated(|_, _| 0.0)), Err(Error::NoCycle(_))));
        let edge_hole = complex(5, 5).with_hole(Hole { i0: 0, j0: 1, i1: 2, j1: 3 }).unwrap();
        assert!(matches!(edge_hole.hole_cycle(), Err(Error::NoCycle(_))));
    }

    #[test]
    fn hole_cells_are_excluded() {
        let c = annulus();
        assert!(!c.is_active(2, c.face(5, 5)));
        assert!(!c.is_active(0, c.vertex(5, 5)));
        assert!(c.is_active(0, c.vertex(4, 4)));
        assert!(!c.is_active(1, c.x_edge(4, 5)));
        assert!(c.is_active(1, c.x_edge(4, 4)));
        assert!(c.boundary(&Chain::cell(2, c.face(5, 5))).is_err());
    }

    proptest! {
        #[test]
        fn stokes_holds_for_random_pairs(seed in any::<u64>(), nx in 2usize..7, ny in 2usize..7) {
            let c = complex(nx, ny);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for degree in 0..2 {
                let form = DiscreteForm { degree, values: (0..c.cell_count(degree)).map(|_| rng.gen_range(-10.0..10.0)).collect() };
                let chain = Chain::from_cells(degree + 1, (0..c.cell_count(degree + 1)).map(|i| (i, rng.gen_range(-3i64..=3))));
                let norm = form.values.iter().map(|v| v * v).sum::<f64>().sqrt();
                let r = c.stokes_residual(&form, &chain).unwrap();
                prop_assert!(r.abs() <= 1e-12 * norm);
                prop_assert!(c.boundary(&c.boundary(&Chain::from_cells(2, (0..c.cell_count(2)).map(|i| (i, rng.gen_range(-5i64..=5))))).unwrap()).unwrap().is_zero());
            }
            let dyadic = DiscreteForm { degree: 0, values: (0..c.cell_count(0)).map(|_| f64::from(rng.gen_range(-4096..=4096)) / 256.0).collect() };
            let dd = c.coboundary(&c.coboundary(&dyadic).unwrap()).unwrap();
            prop_assert!(dd.values.iter().all(|&v| v == 0.0));
        }
    }
}
