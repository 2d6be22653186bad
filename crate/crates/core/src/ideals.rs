//! Left ideal classes of a maximal order, enumerated by a breadth-first
//! `p`-neighbor search that stops once Eichler's mass `(N − 1)/12` is reached.

use std::collections::{HashSet, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::{is_prime, primes_in};
use crate::error::{Error, Result};
use crate::lattice::QuatLattice;
use crate::quaternion::{rat, reduced_discriminant, QuatElement, QuatOrder};

/// A lattice `I` with `R·I ⊆ I` for the fixed maximal order `R`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeftIdeal {
    lattice: QuatLattice,
    norm: BigRational,
}

impl LeftIdeal {
    /// Verifies left `R`-stability before accepting the lattice.
    pub fn new(order: &QuatOrder, lattice: QuatLattice) -> Result<Self> {
        for r in order.basis() {
            for x in lattice.basis() {
                if !lattice.contains(&r.mul(&x)?) {
                    return Err(Error::Inconsistent("lattice is not a left ideal".into()));
                }
            }
        }
        let norm = lattice.content();
        Ok(LeftIdeal { lattice, norm })
    }

    pub fn unit(order: &QuatOrder) -> Self {
        LeftIdeal { lattice: order.lattice().clone(), norm: BigRational::one() }
    }

    pub fn lattice(&self) -> &QuatLattice {
        &self.lattice
    }

    /// Reduced norm `N(I)`: the positive rational making `N(x)/N(I)` primitive.
    pub fn norm(&self) -> &BigRational {
        &self.norm
    }
}

/// Ideal class representatives `I₁ = R, I₂, …` with their right orders and
/// unit weights.
#[derive(Clone, Debug)]
pub struct ClassList {
    level: u64,
    order: QuatOrder,
    ideals: Vec<LeftIdeal>,
    right_orders: Vec<QuatOrder>,
    weights: Vec<u64>,
    inverses: Vec<QuatLattice>,
    neighbor_primes: Vec<u64>,
}

impl ClassList {
    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn order(&self) -> &QuatOrder {
        &self.order
    }

    pub fn n(&self) -> usize {
        self.ideals.len()
    }

    pub fn ideals(&self) -> &[LeftIdeal] {
        &self.ideals
    }

    pub fn right_orders(&self) -> &[QuatOrder] {
        &self.right_orders
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    /// Cached `I_j⁻¹`.
    pub fn inverse(&self, j: usize) -> Result<&QuatLattice> {
        self.inverses.get(j).ok_or(Error::IndexOutOfRange { index: j, n: self.n() })
    }

    /// Primes whose neighbor graphs were walked.
    pub fn neighbor_primes(&self) -> &[u64] {
        &self.neighbor_primes
    }

    pub fn mass(&self) -> BigRational {
        mass_of(&self.weights)
    }

    pub fn weight_product(&self) -> u64 {
        self.weights.iter().product()
    }
}

pub fn mass_of(weights: &[u64]) -> BigRational {
    weights
        .iter()
        .map(|&w| BigRational::new(BigInt::one(), BigInt::from(w)))
        .fold(BigRational::zero(), |a, b| a + b)
}

/// `(N − 1)/12`.
pub fn expected_mass(level: u64) -> BigRational {
    BigRational::new(BigInt::from(level) - 1, BigInt::from(12))
}

/// `{b : I·b ⊆ I}`, certified maximal.
pub fn right_order(ideal: &LeftIdeal) -> Result<QuatOrder> {
    let lat = ideal.lattice().right_order_lattice()?;
    let order = QuatOrder::from_lattice(lat)
        .map_err(|e| Error::Inconsistent(format!("right order: {e}")))?;
    let level = order.algebra().level();
    if reduced_discriminant(&order)? != BigInt::from(level) {
        return Err(Error::Inconsistent("right order is not maximal".into()));
    }
    Ok(order)
}

/// `{b : I·b·I ⊆ I}`; checks `N(I⁻¹)·N(I) = 1`.
pub fn ideal_inverse(ideal: &QuatLattice) -> Result<QuatLattice> {
    let basis = ideal.basis();
    let mut pairs = Vec::with_capacity(16);
    for x in &basis {
        for y in &basis {
            pairs.push((Some(x), Some(y)));
        }
    }
    let inv = ideal.colon(&pairs)?;
    if inv.content() * ideal.content() != BigRational::one() {
        return Err(Error::Inconsistent("N(I⁻¹)·N(I) ≠ 1".into()));
    }
    Ok(inv)
}

/// The lattice generated by all products `x·y`, `x ∈ J`, `y ∈ I`.
pub fn ideal_product(j: &QuatLattice, i: &QuatLattice) -> Result<QuatLattice> {
    j.product(i)
}

/// `I ~ J` iff `J⁻¹I` contains an element of normalized norm 1.
pub fn is_equivalent(i: &LeftIdeal, j: &LeftIdeal) -> Result<bool> {
    equivalent_with_inverse(i.lattice(), &ideal_inverse(j.lattice())?)
}

fn equivalent_with_inverse(i: &QuatLattice, j_inv: &QuatLattice) -> Result<bool> {
    Ok(ideal_product(j_inv, i)?.count_vectors(1)? > 0)
}

/// `|R^×| / 2`.
pub fn unit_weight(order: &QuatOrder) -> Result<u64> {
    let lat = order.lattice();
    if lat.content() != BigRational::one() {
        return Err(Error::Inconsistent("order norm form is not primitive".into()));
    }
    let units = lat.count_vectors(1)?;
    if units % 2 != 0 || units == 0 {
        return Err(Error::Inconsistent(format!("odd unit count {units}")));
    }
    Ok(units / 2)
}

/// The `p + 1` left `R`-ideals `L ⊂ I` of index `p²` with `N(L) = p·N(I)`.
pub fn p_neighbors(order: &QuatOrder, ideal: &LeftIdeal, p: u64) -> Result<Vec<LeftIdeal>> {
    let lat = ideal.lattice();
    let form = lat.integral_form()?;
    let basis = lat.basis();
    let r_basis = order.basis();
    let alg = lat.algebra();
    let target_cov = lat.covolume() * rat((p * p) as i64);
    let p_big = rat(p as i64);
    let scaled: Vec<QuatElement> = basis.iter().map(|e| e.scale(&p_big)).collect();
    // Hash and Eq on QuatLattice ignore its theta-count cache.
    #[allow(clippy::mutable_key_type)]
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let pi = p as i64;
    for code in 1..pi.pow(4) {
        let c = [code % pi, code / pi % pi, code / (pi * pi) % pi, code / (pi * pi * pi)];
        if form.value(&c).rem_euclid(p as i128) != 0 {
            continue;
        }
        let mut alpha = QuatElement::from_ints(alg, [0, 0, 0, 0]);
        for t in 0..4 {
            alpha = alpha.add(&basis[t].scale(&rat(c[t])))?;
        }
        let mut gens = scaled.clone();
        for r in &r_basis {
            gens.push(r.mul(&alpha)?);
        }
        let cand = QuatLattice::from_generators(&gens)?;
        if cand.covolume() != target_cov || !seen.insert(cand.clone()) {
            continue;
        }
        let nb = LeftIdeal::new(order, cand)?;
        if nb.norm() != &(ideal.norm() * &p_big) {
            return Err(Error::Inconsistent("neighbor has the wrong norm".into()));
        }
        out.push(nb);
    }
    if out.len() as u64 != p + 1 {
        return Err(Error::Inconsistent(format!("found {} neighbors at p = {p}", out.len())));
    }
    Ok(out)
}

/// Breadth-first neighbor search from `I₁ = R`, terminated by the mass formula.
pub fn enumerate_classes(order: &QuatOrder, level: u64) -> Result<ClassList> {
    if !is_prime(level) {
        return Err(Error::NotPrime(level));
    }
    if order.algebra().level() != level {
        return Err(Error::Precondition("order level does not match".into()));
    }
    let target = expected_mass(level);
    let mut list = ClassList {
        level,
        order: order.clone(),
        ideals: Vec::new(),
        right_orders: Vec::new(),
        weights: Vec::new(),
        inverses: Vec::new(),
        neighbor_primes: Vec::new(),
    };
    let unit = LeftIdeal::unit(order);
    list.weights.push(unit_weight(order)?);
    list.inverses.push(ideal_inverse(unit.lattice())?);
    list.right_orders.push(order.clone());
    list.ideals.push(unit);

    for p in primes_in(2, 99).into_iter().filter(|&p| p != level) {
        if list.mass() == target {
            break;
        }
        list.neighbor_primes.push(p);
        let mut queue: VecDeque<usize> = (0..list.n()).collect();
        while let Some(idx) = queue.pop_front() {
            let ideal = list.ideals[idx].clone();
            for nb in p_neighbors(order, &ideal, p)? {
                let ro = right_order(&nb)?;
                let w = unit_weight(&ro)?;
                let mut known = false;
                for k in 0..list.n() {
                    if list.weights[k] == w && equivalent_with_inverse(nb.lattice(), &list.inverses[k])? {
                        known = true;
                        break;
                    }
                }
                if known {
                    continue;
                }
                list.inverses.push(ideal_inverse(nb.lattice())?);
                list.right_orders.push(ro);
                list.weights.push(w);
                list.ideals.push(nb);
                queue.push_back(list.n() - 1);
                let mass = list.mass();
                if mass == target {
                    return Ok(list);
                }
                if mass > target {
                    return Err(Error::Enumeration(format!("mass {mass} exceeds {target}")));
                }
            }
        }
    }
    if list.mass() == target {
        Ok(list)
    } else {
        Err(Error::Enumeration(format!(
            "mass {} short of {} after primes < 100",
            list.mass(),
            target
        )))
    }
}
