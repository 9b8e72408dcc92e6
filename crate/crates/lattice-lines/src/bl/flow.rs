//! Flow fields: nonnegative edge weights obeying the per-site conservation
//! law in_sw + out_ne = in_nw + out_se… more precisely
//! η(e^↖) + η(e^↗) = η(e^↙) + η(e^↘) at every site.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::domain::{RectDomain, Site};
use super::weight::Weight;

/// Births ξ ≥ 0 on the domain sites, stored row-major in i then j.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BirthField<W> {
    domain: RectDomain,
    values: Vec<W>,
}

impl<W: Weight> BirthField<W> {
    pub fn zero(domain: RectDomain) -> Self {
        BirthField {
            domain,
            values: vec![W::ZERO; domain.site_count()],
        }
    }

    pub fn from_values(domain: RectDomain, values: Vec<W>) -> Result<Self> {
        if values.len() != domain.site_count() {
            return Err(Error::schema(format!(
                "birth field needs {} values, got {}",
                domain.site_count(),
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_nonnegative()) {
            return Err(Error::parameter(format!("negative birth value {v:?}")));
        }
        Ok(BirthField { domain, values })
    }

    pub fn domain(&self) -> RectDomain {
        self.domain
    }

    fn idx(&self, i: i32, j: i32) -> usize {
        debug_assert!(self.domain.contains(Site::new(i, j)));
        (i as usize - 1) * self.domain.m() as usize + (j as usize - 1)
    }

    pub fn get(&self, i: i32, j: i32) -> W {
        self.values[self.idx(i, j)]
    }

    pub fn set(&mut self, i: i32, j: i32, v: W) {
        let k = self.idx(i, j);
        self.values[k] = v;
    }

    pub fn values(&self) -> &[W] {
        &self.values
    }

    pub fn total(&self) -> W {
        self.values.iter().fold(W::ZERO, |a, &b| a.add(b))
    }
}

/// Boundary inflows: ζ⁺ indexed by column i (entering each bottom-row
/// site) and ζ⁻ indexed by row j (entering each left-column site).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryFlows<W> {
    pub zeta_plus: Vec<W>,
    pub zeta_minus: Vec<W>,
}

impl<W: Weight> BoundaryFlows<W> {
    pub fn zero(domain: RectDomain) -> Self {
        BoundaryFlows {
            zeta_plus: vec![W::ZERO; domain.n() as usize],
            zeta_minus: vec![W::ZERO; domain.m() as usize],
        }
    }

    pub fn validate(&self, domain: RectDomain) -> Result<()> {
        if self.zeta_plus.len() != domain.n() as usize {
            return Err(Error::schema(format!(
                "zeta_plus needs one entry per column: {} != {}",
                self.zeta_plus.len(),
                domain.n()
            )));
        }
        if self.zeta_minus.len() != domain.m() as usize {
            return Err(Error::schema(format!(
                "zeta_minus needs one entry per row: {} != {}",
                self.zeta_minus.len(),
                domain.m()
            )));
        }
        if self
            .zeta_plus
            .iter()
            .chain(self.zeta_minus.iter())
            .any(|v| !v.is_nonnegative())
        {
            return Err(Error::parameter("negative boundary flow".to_string()));
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.zeta_plus
            .iter()
            .chain(self.zeta_minus.iter())
            .all(|v| v.approx_eq(W::ZERO) && W::ZERO.approx_eq(*v))
    }
}

/// Edge weights on the closure of a rectangular domain.
///
/// `up[i][j]` is the flow on the grid edge (i,j)→(i,j+1) — northeast on
/// the tilted lattice — for i ∈ 1..=N, j ∈ 0..=M. `right[i][j]` is the
/// flow on (i,j)→(i+1,j) — southeast — for i ∈ 0..=N, j ∈ 1..=M. Row
/// j = 0 of `up` carries the entering ζ⁺, column i = 0 of `right` the
/// entering ζ⁻; j = M and i = N are the exiting η⁺ and η⁻.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowField<W> {
    domain: RectDomain,
    up: Vec<W>,
    right: Vec<W>,
}

impl<W: Weight> FlowField<W> {
    pub fn zero(domain: RectDomain) -> Self {
        let (n, m) = (domain.n() as usize, domain.m() as usize);
        FlowField {
            domain,
            up: vec![W::ZERO; n * (m + 1)],
            right: vec![W::ZERO; (n + 1) * m],
        }
    }

    pub fn domain(&self) -> RectDomain {
        self.domain
    }

    fn up_idx(&self, i: i32, j: i32) -> usize {
        let (n, m) = (self.domain.n() as i32, self.domain.m() as i32);
        debug_assert!(i >= 1 && i <= n && j >= 0 && j <= m, "up edge ({i},{j})");
        (i as usize - 1) * (m as usize + 1) + j as usize
    }

    fn right_idx(&self, i: i32, j: i32) -> usize {
        let (n, m) = (self.domain.n() as i32, self.domain.m() as i32);
        debug_assert!(i >= 0 && i <= n && j >= 1 && j <= m, "right edge ({i},{j})");
        i as usize * m as usize + (j as usize - 1)
    }

    /// Flow on the northeast edge (i,j)→(i,j+1).
    pub fn up(&self, i: i32, j: i32) -> W {
        self.up[self.up_idx(i, j)]
    }

    /// Flow on the southeast edge (i,j)→(i+1,j).
    pub fn right(&self, i: i32, j: i32) -> W {
        self.right[self.right_idx(i, j)]
    }

    pub fn set_up(&mut self, i: i32, j: i32, v: W) {
        let k = self.up_idx(i, j);
        self.up[k] = v;
    }

    pub fn set_right(&mut self, i: i32, j: i32, v: W) {
        let k = self.right_idx(i, j);
        self.right[k] = v;
    }

    pub fn add_up(&mut self, i: i32, j: i32, v: W) {
        let k = self.up_idx(i, j);
        self.up[k] = self.up[k].add(v);
    }

    pub fn add_right(&mut self, i: i32, j: i32, v: W) {
        let k = self.right_idx(i, j);
        self.right[k] = self.right[k].add(v);
    }

    // Directional views at a site, in tilted-lattice terms.

    /// η(e^↙): ascending flow entering (i,j) from the southwest.
    pub fn in_sw(&self, s: Site) -> W {
        self.up(s.i, s.j - 1)
    }

    /// η(e^↖): descending flow entering (i,j) from the northwest.
    pub fn in_nw(&self, s: Site) -> W {
        self.right(s.i - 1, s.j)
    }

    /// η(e^↗): ascending flow leaving (i,j) to the northeast.
    pub fn out_ne(&self, s: Site) -> W {
        self.up(s.i, s.j)
    }

    /// η(e^↘): descending flow leaving (i,j) to the southeast.
    pub fn out_se(&self, s: Site) -> W {
        self.right(s.i, s.j)
    }

    /// Births recovered from the flows: ξ = η⁺ ∧ η⁻.
    pub fn births_at(&self, s: Site) -> W {
        self.out_ne(s).min(self.out_se(s))
    }

    pub fn recovered_births(&self) -> BirthField<W> {
        let mut b = BirthField::zero(self.domain);
        for s in self.domain.sites() {
            b.set(s.i, s.j, self.births_at(s));
        }
        b
    }

    pub fn boundary(&self) -> BoundaryFlows<W> {
        let (n, m) = (self.domain.n() as i32, self.domain.m() as i32);
        BoundaryFlows {
            zeta_plus: (1..=n).map(|i| self.up(i, 0)).collect(),
            zeta_minus: (1..=m).map(|j| self.right(0, j)).collect(),
        }
    }

    /// Checks conservation at every site: exact in integer mode, within
    /// 1e-9 absolute in real mode.
    pub fn check_conservation(&self) -> Result<()> {
        for s in self.domain.sites() {
            let lhs = self.in_nw(s).add(self.out_ne(s));
            let rhs = self.in_sw(s).add(self.out_se(s));
            if !lhs.approx_eq(rhs) || !rhs.approx_eq(lhs) {
                return Err(Error::integrity(format!(
                    "conservation violated at ({}, {}): {:?} vs {:?}",
                    s.i, s.j, lhs, rhs
                )));
            }
        }
        Ok(())
    }
}

/// Builds the flow field generated by boundary inflows and births: sweeps
/// sites in dependency order applying η± = ξ + [ζ± − ζ∓]⁺ with ζ± pulled
/// from the southwest/northwest neighbour (or the boundary data on the
/// first row/column).
pub fn flow_from_boundary<W: Weight>(
    births: &BirthField<W>,
    boundary: &BoundaryFlows<W>,
) -> Result<FlowField<W>> {
    let domain = births.domain();
    boundary.validate(domain)?;
    let mut field = FlowField::zero(domain);
    let (n, m) = (domain.n() as i32, domain.m() as i32);
    for i in 1..=n {
        field.set_up(i, 0, boundary.zeta_plus[i as usize - 1]);
    }
    for j in 1..=m {
        field.set_right(0, j, boundary.zeta_minus[j as usize - 1]);
    }
    for i in 1..=n {
        for j in 1..=m {
            let s = Site::new(i, j);
            let zeta_plus = field.in_sw(s);
            let zeta_minus = field.in_nw(s);
            let xi = births.get(i, j);
            field.set_up(i, j, xi.add(zeta_plus.pos_diff(zeta_minus)));
            field.set_right(i, j, xi.add(zeta_minus.pos_diff(zeta_plus)));
        }
    }
    Ok(field)
}

/// Mirrors a pure birth field through t ↦ -t. In grid terms the image of
/// site (i, j) on the N×M domain is (M+1-j, N+1-i) on the M×N domain.
/// The crossing total is invariant under this map.
pub fn reflect<W: Weight>(field: &FlowField<W>) -> Result<FlowField<W>> {
    if !field.boundary().is_zero() {
        return Err(Error::Unsupported(
            "reflection is defined for pure birth fields (zero boundary inflow)".to_string(),
        ));
    }
    let src = field.domain();
    let dst = RectDomain::new(src.m(), src.n())?;
    let births = field.recovered_births();
    let mut reflected = BirthField::zero(dst);
    for s in src.sites() {
        let (ri, rj) = (src.m() as i32 + 1 - s.j, src.n() as i32 + 1 - s.i);
        reflected.set(ri, rj, births.get(s.i, s.j));
    }
    flow_from_boundary(&reflected, &BoundaryFlows::zero(dst))
}

/// Absorbs boundary inflows into births on the enlarged (N+1)×(M+1)
/// domain: the new bottom row carries ζ⁺, the new left column ζ⁻, and the
/// corner is zero. Crossing totals agree: H(ζ°, ξ) on the original domain
/// equals H(ξ') on the enlarged one.
pub fn absorb_boundary<W: Weight>(
    births: &BirthField<W>,
    boundary: &BoundaryFlows<W>,
) -> Result<BirthField<W>> {
    let src = births.domain();
    boundary.validate(src)?;
    let dst = RectDomain::new(src.n() + 1, src.m() + 1)?;
    let mut out = BirthField::zero(dst);
    for s in src.sites() {
        out.set(s.i + 1, s.j + 1, births.get(s.i, s.j));
    }
    for i in 1..=src.n() as i32 {
        out.set(i + 1, 1, boundary.zeta_plus[i as usize - 1]);
    }
    for j in 1..=src.m() as i32 {
        out.set(1, j + 1, boundary.zeta_minus[j as usize - 1]);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_by_one(xi: u64) -> FlowField<u64> {
        let d = RectDomain::new(1, 1).unwrap();
        let mut births = BirthField::zero(d);
        births.set(1, 1, xi);
        flow_from_boundary(&births, &BoundaryFlows::zero(d)).unwrap()
    }

    #[test]
    fn single_site_birth_splits_both_ways() {
        let f = one_by_one(5);
        let s = Site::new(1, 1);
        assert_eq!(f.out_ne(s), 5);
        assert_eq!(f.out_se(s), 5);
        assert_eq!(f.in_sw(s), 0);
        assert_eq!(f.in_nw(s), 0);
        f.check_conservation().unwrap();
        assert_eq!(f.births_at(s), 5);
    }

    #[test]
    fn zero_inputs_give_zero_field() {
        let d = RectDomain::new(4, 6).unwrap();
        let f = flow_from_boundary(&BirthField::<u64>::zero(d), &BoundaryFlows::zero(d)).unwrap();
        for s in d.sites() {
            assert_eq!(f.out_ne(s), 0);
            assert_eq!(f.out_se(s), 0);
        }
    }

    #[test]
    fn conservation_holds_with_boundary_inflow() {
        let d = RectDomain::new(3, 3).unwrap();
        let mut births = BirthField::zero(d);
        births.set(2, 2, 7u64);
        births.set(3, 1, 2);
        let boundary = BoundaryFlows {
            zeta_plus: vec![1, 0, 4],
            zeta_minus: vec![0, 2, 5],
        };
        let f = flow_from_boundary(&births, &boundary).unwrap();
        f.check_conservation().unwrap();
        assert_eq!(f.boundary(), boundary);
    }

    #[test]
    fn annihilation_consumes_pairs() {
        // ζ⁺ = 3 from below meets ζ⁻ = 5 from the left at a birth-free
        // site: η⁺ = 0, η⁻ = 2, recovered ξ = 0.
        let d = RectDomain::new(1, 1).unwrap();
        let boundary = BoundaryFlows {
            zeta_plus: vec![3u64],
            zeta_minus: vec![5],
        };
        let f = flow_from_boundary(&BirthField::zero(d), &boundary).unwrap();
        let s = Site::new(1, 1);
        assert_eq!(f.out_ne(s), 0);
        assert_eq!(f.out_se(s), 2);
        assert_eq!(f.births_at(s), 0);
    }

    #[test]
    fn recovered_births_round_trip() {
        let d = RectDomain::new(5, 4).unwrap();
        let mut births = BirthField::zero(d);
        let mut stream = crate::rng::SeededStream::new(900, 0);
        for s in d.sites() {
            births.set(s.i, s.j, stream.below(6));
        }
        let f = flow_from_boundary(&births, &BoundaryFlows::zero(d)).unwrap();
        assert_eq!(f.recovered_births(), births);
    }

    #[test]
    fn reflect_requires_pure_birth() {
        let d = RectDomain::new(2, 2).unwrap();
        let boundary = BoundaryFlows {
            zeta_plus: vec![1u64, 0],
            zeta_minus: vec![0, 0],
        };
        let f = flow_from_boundary(&BirthField::zero(d), &boundary).unwrap();
        assert!(matches!(reflect(&f), Err(Error::Unsupported(_))));
    }

    #[test]
    fn reflect_zero_and_known_example() {
        let d = RectDomain::new(2, 3).unwrap();
        let zero = flow_from_boundary(&BirthField::<u64>::zero(d), &BoundaryFlows::zero(d))
            .unwrap();
        let mirrored = reflect(&zero).unwrap();
        assert_eq!(mirrored, FlowField::zero(RectDomain::new(3, 2).unwrap()));

        // The 2x2 instance with births 1,3,2,4 has crossing total 8 on
        // both sides of the mirror.
        let d = RectDomain::new(2, 2).unwrap();
        let mut births = BirthField::zero(d);
        births.set(1, 1, 1u64);
        births.set(2, 1, 3);
        births.set(1, 2, 2);
        births.set(2, 2, 4);
        let f = flow_from_boundary(&births, &BoundaryFlows::zero(d)).unwrap();
        let m = reflect(&f).unwrap();
        use crate::bl::decompose::crossing_total;
        assert_eq!(crossing_total(&f).unwrap().h, 8);
        assert_eq!(crossing_total(&m).unwrap().h, 8);
    }
}
