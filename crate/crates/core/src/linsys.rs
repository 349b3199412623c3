//! Linear systems on a K3 surface, decided from the Picard lattice and its
//! (−2)-curves alone.
//!
//! `h⁰` is computed by stripping fixed (−2)-components until the class is nef
//! and then applying Riemann–Roch with the vanishing of `h¹` for nef classes
//! away from multiples of elliptic fibres.

use std::sync::OnceLock;

use dashmap::DashMap;

use crate::arith::IntMatrix;
use crate::cones::{self, RationalCone};
use crate::database::LatticeRecord;
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::negcurves;
use crate::quadric::affine_quadric_points;
use crate::vector::{DivisorClass, IntVector};

/// `(h⁰, h¹, h²)` of a divisor class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Cohomology {
    pub h0: u64,
    pub h1: u64,
    pub h2: u64,
}

pub struct K3Surface {
    lattice: Lattice,
    neg: Vec<DivisorClass>,
    /// `Q c` for each curve, so that `D · c` is a plain dot product.
    neg_duals: Vec<IntVector>,
    ample: DivisorClass,
    ample_dual: IntVector,
    eff: RationalCone,
    nef: RationalCone,
    beff: OnceLock<Vec<DivisorClass>>,
    bnef: OnceLock<Vec<DivisorClass>>,
    elliptic: OnceLock<Vec<DivisorClass>>,
    h0_memo: DashMap<DivisorClass, u64>,
}

impl std::fmt::Debug for K3Surface {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("K3Surface")
            .field("gram", self.lattice.gram())
            .field("neg", &self.neg)
            .field("ample", &self.ample)
            .finish()
    }
}

impl K3Surface {
    /// `ample` defaults to the primitive sum of the nef cone's rays.
    pub fn new(lattice: Lattice, neg: Vec<DivisorClass>, ample: Option<DivisorClass>) -> Result<Self> {
        if !lattice.is_even() {
            return Err(Error::Invariant("Picard lattice of a K3 surface must be even".into()));
        }
        if neg.is_empty() {
            return Err(Error::Precondition("no (-2)-curves: the effective cone is not polyhedral".into()));
        }
        for c in &neg {
            let s = lattice.square(c)?;
            if s != -2 {
                return Err(Error::Invariant(format!("class {c} has square {s}, not -2")));
            }
        }
        let mut neg = neg;
        neg.sort();
        neg.dedup();
        let n = lattice.rank();
        let eff = cones::cone_from_generators(n, &neg)?;
        if !eff.is_full_dimensional() {
            return Err(Error::Degenerate("the (-2)-curves do not span the lattice".into()));
        }
        let neg_duals: Vec<IntVector> = neg.iter().map(|c| lattice.dual_functional(c)).collect();
        let nef = cones::dual_cone(&cones::cone_from_generators(n, &neg_duals)?)?;
        let ample = match ample {
            Some(a) => a,
            None => nef.rays.iter().fold(IntVector::zeros(n), |acc, r| &acc + r).primitive(),
        };
        if lattice.square(&ample)? <= 0 {
            return Err(Error::Invariant(format!("ample class {ample} must have positive square")));
        }
        if let Some(c) = neg.iter().find(|c| lattice.pair(&ample, c) <= 0) {
            return Err(Error::Invariant(format!("ample class {ample} is not positive on {c}")));
        }
        let ample_dual = lattice.dual_functional(&ample);
        Ok(K3Surface {
            lattice,
            neg,
            neg_duals,
            ample,
            ample_dual,
            eff,
            nef,
            beff: OnceLock::new(),
            bnef: OnceLock::new(),
            elliptic: OnceLock::new(),
            h0_memo: DashMap::new(),
        })
    }

    /// Builds the surface from a record, searching for the curves if none are listed.
    pub fn from_record(rec: &LatticeRecord) -> Result<Self> {
        let lattice = rec.lattice()?;
        let neg = match &rec.neg_curves {
            Some(neg) => neg.clone(),
            None => negcurves::find_neg_curves(&lattice)?,
        };
        Self::new(lattice, neg, None)
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    pub fn neg(&self) -> &[DivisorClass] {
        &self.neg
    }

    pub fn ample(&self) -> &DivisorClass {
        &self.ample
    }

    pub fn pair(&self, a: &IntVector, b: &IntVector) -> i64 {
        self.lattice.pair(a, b)
    }

    pub fn sq(&self, a: &IntVector) -> i64 {
        self.lattice.sq(a)
    }

    pub fn eff_cone(&self) -> &RationalCone {
        &self.eff
    }

    pub fn nef_cone(&self) -> &RationalCone {
        &self.nef
    }

    /// Hilbert basis of the effective cone.
    pub fn beff(&self) -> &[DivisorClass] {
        self.beff.get_or_init(|| cones::hilbert_basis(&self.eff).expect("effective cone is full-dimensional"))
    }

    /// Hilbert basis of the nef cone.
    pub fn bnef(&self) -> &[DivisorClass] {
        self.bnef.get_or_init(|| cones::hilbert_basis(&self.nef).expect("nef cone is full-dimensional"))
    }

    pub fn is_nef(&self, d: &DivisorClass) -> bool {
        self.neg_duals.iter().all(|c| c.dot(d) >= 0)
    }

    pub fn h0(&self, d: &DivisorClass) -> u64 {
        if let Some(v) = self.h0_memo.get(d) {
            return *v;
        }
        let v = self.h0_uncached(d);
        self.h0_memo.insert(d.clone(), v);
        v
    }

    fn h0_uncached(&self, d: &DivisorClass) -> u64 {
        let mut d = d.clone();
        'strip: loop {
            if d.is_zero() {
                return 1;
            }
            if self.ample_dual.dot(&d) < 0 {
                return 0;
            }
            for (c, qc) in self.neg.iter().zip(&self.neg_duals) {
                let p = qc.dot(&d);
                if p < 0 {
                    // Each copy of c removed raises D · c by 2.
                    let m = ((-p + 1) / 2) as i64;
                    d = d.add_scaled(-m, c);
                    continue 'strip;
                }
            }
            break;
        }
        if d.is_zero() {
            return 1;
        }
        let s = self.sq(&d);
        match s {
            s if s > 0 => 2 + (s / 2) as u64,
            0 => d.content() as u64 + 1,
            _ => 0,
        }
    }

    pub fn h2(&self, d: &DivisorClass) -> u64 {
        self.h0(&-d)
    }

    pub fn h1(&self, d: &DivisorClass) -> u64 {
        let chi = 2 + self.sq(d) / 2;
        let h1 = self.h0(d) as i64 + self.h2(d) as i64 - chi;
        assert!(h1 >= 0, "negative h1 for {d}");
        h1 as u64
    }

    pub fn cohomology(&self, d: &DivisorClass) -> Cohomology {
        Cohomology { h0: self.h0(d), h1: self.h1(d), h2: self.h2(d) }
    }

    pub fn is_effective(&self, d: &DivisorClass) -> bool {
        self.h0(d) > 0
    }

    /// Primitive isotropic nef classes: the fibre classes of elliptic fibrations.
    pub fn elliptic_classes(&self) -> &[DivisorClass] {
        self.elliptic.get_or_init(|| self.nef.rays.iter().filter(|r| self.sq(r) == 0).cloned().collect())
    }

    fn require_nef_effective(&self, d: &DivisorClass) -> Result<()> {
        if d.is_zero() || !self.is_nef(d) || !self.is_effective(d) {
            return Err(Error::Precondition(format!("{d} must be a nonzero nef effective class")));
        }
        Ok(())
    }

    /// Fails exactly when `D = kF + E` with `k >= 2`, `F` elliptic, `E` a curve and `F · E = 1`.
    pub fn is_bpf(&self, d: &DivisorClass) -> Result<bool> {
        self.require_nef_effective(d)?;
        Ok(self.bpf_obstruction(d).is_none())
    }

    /// The `(k, F, E)` witnessing a base point, if any.
    pub fn bpf_obstruction(&self, d: &DivisorClass) -> Option<(i64, DivisorClass, DivisorClass)> {
        for e in &self.neg {
            let rest = d - e;
            for f in self.elliptic_classes() {
                if self.pair(f, e) != 1 {
                    continue;
                }
                if let Some(k) = rest.multiple_of(f).filter(|&k| k >= 2) {
                    return Some((k, f.clone(), e.clone()));
                }
            }
        }
        None
    }

    /// Nef primitive isotropic classes `F` with `D · F = k`.
    pub fn isotropic_slice(&self, d: &DivisorClass, k: i64) -> Result<Vec<DivisorClass>> {
        if self.sq(d) <= 0 {
            return Err(Error::Precondition(format!("{d} must have positive square")));
        }
        let u = self.lattice.dual_functional(d);
        let pts = affine_quadric_points(&self.lattice, &u, k, 0)?;
        Ok(pts.into_iter().filter(|f| f.is_primitive() && self.is_nef(f)).collect())
    }

    fn is_twice_degree_two(&self, d: &DivisorClass) -> bool {
        d.content() % 2 == 0 && {
            let b = IntVector::new(d.iter().map(|x| x / 2).collect::<Vec<_>>());
            self.sq(&b) == 2
        }
    }

    pub fn is_hyperelliptic(&self, d: &DivisorClass) -> Result<bool> {
        if !self.is_nef(d) || self.sq(d) <= 0 {
            return Err(Error::Precondition(format!("{d} must be nef with positive square")));
        }
        Ok(self.sq(d) == 2 || !self.isotropic_slice(d, 2)?.is_empty() || self.is_twice_degree_two(d))
    }

    pub fn is_very_ample(&self, d: &DivisorClass) -> Result<bool> {
        if !self.is_nef(d) || self.sq(d) < 4 {
            return Ok(false);
        }
        if self.neg_duals.iter().any(|c| c.dot(d) == 0) || self.is_twice_degree_two(d) {
            return Ok(false);
        }
        Ok(self.isotropic_slice(d, 1)?.is_empty() && self.isotropic_slice(d, 2)?.is_empty())
    }

    /// Checks an involution for the degree-three elimination: isometry, order two, fixes `a`.
    pub fn check_involution(&self, iota: &IntMatrix, a: &DivisorClass) -> Result<()> {
        if !self.lattice.is_isometry(iota)? {
            return Err(Error::InvalidInvolution("not an isometry".into()));
        }
        if iota.checked_mul(iota)? != IntMatrix::identity(self.rank()) {
            return Err(Error::InvalidInvolution("not of order two".into()));
        }
        if crate::lattice::apply(iota, a) != *a {
            return Err(Error::InvalidInvolution(format!("does not fix {a}")));
        }
        Ok(())
    }

    /// Number of memoized `h⁰` values.
    pub fn memo_len(&self) -> usize {
        self.h0_memo.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::database;

    fn surface(name: &str) -> K3Surface {
        K3Surface::from_record(database::find(name).unwrap()).unwrap()
    }

    fn v(x: [i64; 3]) -> IntVector {
        IntVector::from(x)
    }

    #[test]
    fn nef_rays() {
        let s = surface("S_1");
        let expected: Vec<IntVector> =
            [[1, 0, 0], [2, -3, 0], [2, 0, -3], [4, -6, -3], [4, -3, -6], [5, -6, -6]].map(v).into();
        let mut expected = expected;
        expected.sort();
        assert_eq!(s.nef_cone().rays, expected);
        assert!(s.nef_cone().contains_strictly(s.ample()));
        assert_eq!(surface("S_{4,1,1}").nef_cone().rays, [[0, 1, 1], [1, 3, 5], [1, 4, 4]].map(v).to_vec());
    }

    #[test]
    fn nefness() {
        let s = surface("S_1");
        assert!(s.is_nef(&v([1, -1, -1])));
        assert!(!s.is_nef(&v([0, 1, 0])));
        assert!(surface("S_{4,1,1}").is_nef(&v([0, 1, 1])));
    }

    #[test]
    fn sections() {
        let s = surface("S_1");
        assert_eq!(s.h0(&v([0, 1, 0])), 1);
        assert_eq!(s.h0(&v([1, -1, -1])), 3);
        assert_eq!(s.h0(&v([2, -3, 0])), 5);
        assert_eq!(s.h2(&v([1, -1, -1])), 0);
        assert_eq!(s.h2(&IntVector::zeros(3)), 1);
        assert_eq!(s.h2(&v([0, -1, 0])), 1);
        assert_eq!(s.h1(&v([1, -1, -1])), 0);
        assert_eq!(s.h1(&IntVector::zeros(3)), 0);
        let t = surface("S_{4,1,1}");
        assert_eq!(t.sq(&v([0, 1, 1])), 0);
        assert_eq!(t.h0(&v([0, 2, 2])), 3);
        assert_eq!(t.h1(&v([0, 2, 2])), 1);
    }

    #[test]
    fn effectivity() {
        let s = surface("S_1");
        assert!(s.is_effective(&v([1, -1, -1])));
        assert!(!s.is_effective(&v([0, -1, 0])));
        assert!(s.is_effective(&IntVector::zeros(3)));
    }

    #[test]
    fn elliptic_fibres() {
        assert!(surface("S_1").elliptic_classes().is_empty());
        let t = surface("S_{4,1,1}");
        assert_eq!(t.elliptic_classes(), [[0, 1, 1], [1, 3, 5], [1, 4, 4]].map(v).as_slice());
        let u = surface("S_{1,1,2}");
        let e = u.elliptic_classes();
        assert!(e.contains(&v([0, 2, 1])) && e.contains(&v([1, 1, 1])));
        assert_eq!(u.pair(&v([0, 2, 1]), &v([1, 1, 1])), 2);
    }

    #[test]
    fn base_points() {
        let s = surface("S_{1,1,1}");
        assert_eq!(s.sq(&v([1, 1, 1])), 0);
        assert_eq!(s.sq(&v([-1, 0, 0])), -2);
        assert_eq!(s.pair(&v([1, 1, 1]), &v([-1, 0, 0])), 1);
        assert!(!s.is_bpf(&v([1, 2, 2])).unwrap());
        assert!(surface("S_1").is_bpf(&v([1, -1, -1])).unwrap());
        assert!(surface("S_{4,1,1}").is_bpf(&v([0, 1, 1])).unwrap());
        assert!(surface("S_1").is_bpf(&v([0, 1, 0])).is_err());
        assert!(surface("S_1").is_bpf(&IntVector::zeros(3)).is_err());
    }

    #[test]
    fn hyperelliptic_and_very_ample() {
        let s = surface("S_1");
        assert!(s.is_hyperelliptic(&v([1, -1, -1])).unwrap());
        assert!(!s.is_hyperelliptic(&v([1, 0, 0])).unwrap());
        let t = surface("S_{4,1,1}");
        assert!(!t.is_hyperelliptic(&v([1, 4, 5])).unwrap());
        assert!(t.is_very_ample(&v([1, 4, 5])).unwrap());
        assert!(!s.is_very_ample(&v([1, -1, -1])).unwrap());
        assert!(!s.is_very_ample(&v([2, -3, 0])).unwrap());
        assert!(s.is_hyperelliptic(&v([0, 1, 0])).is_err());
    }

    #[test]
    fn isotropic_slices() {
        assert!(surface("S_1").isotropic_slice(&v([1, 0, 0]), 2).unwrap().is_empty());
        let t = surface("S_{4,1,1}");
        assert_eq!(t.isotropic_slice(&v([1, 4, 5]), 4).unwrap(), [[0, 1, 1], [1, 3, 5], [1, 4, 4]].map(v).to_vec());
    }

    #[test]
    fn involution_checks() {
        let s = surface("S_1");
        let iota = IntMatrix::from_rows(&[vec![5, -6, -6], vec![2, -3, -2], vec![2, -2, -3]]).unwrap();
        s.check_involution(&iota, &v([1, -1, -1])).unwrap();
        assert!(s.check_involution(&iota, &v([1, 0, 0])).is_err());
        let swap = IntMatrix::from_rows(&[vec![1, 0, 0], vec![0, 0, 1], vec![0, 1, 0]]).unwrap();
        s.check_involution(&swap, &v([1, -1, -1])).unwrap();
        let bad = IntMatrix::from_rows(&[vec![1, 1, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        assert!(matches!(s.check_involution(&bad, &v([1, 0, 0])), Err(Error::InvalidInvolution(_))));
    }

    #[test]
    fn rejects_invalid_surfaces() {
        let l = Lattice::from_rows(&[vec![6, 0, 0], vec![0, -2, 0], vec![0, 0, -2]]).unwrap();
        assert!(K3Surface::new(l.clone(), vec![v([1, 0, 0])], None).is_err());
        assert!(K3Surface::new(l.clone(), vec![], None).is_err());
        let neg = database::find("S_1").unwrap().neg_curves.clone().unwrap();
        assert!(K3Surface::new(l, neg, Some(v([0, 1, 0]))).is_err());
    }
}
