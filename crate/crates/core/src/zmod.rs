//! Combinatorics and discrete Fourier analysis over `Z_m^n`.
//!
//! Inputs are indexed lexicographically with the leftmost digit most
//! significant, so index `i` of an input space is the base-`m` expansion of
//! `i`. Every dense per-input table in the crate uses this ordering.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

/// Largest input space that may be enumerated.
pub const MAX_INPUTS: usize = 10_000_000;

/// Absolute tolerance below which a Fourier mode counts as vanished.
pub const VANISHING_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ZmodError {
    #[error("input space {m}^{n} exceeds the enumeration cap of {cap}")]
    SizeOverflow { n: usize, m: u32, cap: usize },
    #[error("symbol size {0} is not prime; parity machinery requires a field")]
    NotPrime(u32),
    #[error("invalid input space: n = {n}, m = {m}")]
    InvalidSize { n: usize, m: u32 },
    #[error("parity masks need at least two digits (n = {0})")]
    TooFewDigits(usize),
    #[error("digit {digit} out of range for symbol size {m}")]
    DigitOutOfRange { digit: u32, m: u32 },
    #[error("expected {expected} digits, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("mask must be nonzero")]
    ZeroMask,
    #[error("function covers {got} of {expected} inputs")]
    PartialDomain { expected: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, ZmodError>;

pub fn is_prime(m: u32) -> bool {
    if m < 2 {
        return false;
    }
    let mut p = 2u32;
    while p * p <= m {
        if m.is_multiple_of(p) {
            return false;
        }
        p += 1;
    }
    true
}

/// Modular inverse in `Z_m` for prime `m`.
pub fn inverse_mod(a: u32, m: u32) -> Option<u32> {
    let a = a % m;
    (1..m).find(|&c| (a as u64 * c as u64) % m as u64 == 1)
}

/// The set `Z_m^n` with its lexicographic indexing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct InputSpace {
    n: usize,
    m: u32,
    size: usize,
}

impl InputSpace {
    pub fn new(n: usize, m: u32) -> Result<Self> {
        if n == 0 || m < 2 {
            return Err(ZmodError::InvalidSize { n, m });
        }
        let mut size: usize = 1;
        for _ in 0..n {
            size = size
                .checked_mul(m as usize)
                .filter(|&s| s <= MAX_INPUTS)
                .ok_or(ZmodError::SizeOverflow { n, m, cap: MAX_INPUTS })?;
        }
        Ok(Self { n, m, size })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Number of inputs, `m^n`.
    pub fn size(&self) -> usize {
        self.size
    }

    /// Stride of digit `position` in the lexicographic index.
    pub fn stride(&self, position: usize) -> usize {
        (self.m as usize).pow((self.n - 1 - position) as u32)
    }

    pub fn index(&self, digits: &[u32]) -> usize {
        debug_assert_eq!(digits.len(), self.n);
        digits
            .iter()
            .fold(0usize, |acc, &d| acc * self.m as usize + d as usize)
    }

    pub fn digit(&self, index: usize, position: usize) -> u32 {
        ((index / self.stride(position)) % self.m as usize) as u32
    }

    pub fn digits(&self, index: usize) -> Vec<u32> {
        (0..self.n).map(|p| self.digit(index, p)).collect()
    }

    pub fn string(&self, index: usize) -> InputString {
        InputString {
            digits: self.digits(index),
            m: self.m,
        }
    }

    pub fn strings(&self) -> impl Iterator<Item = InputString> + '_ {
        (0..self.size).map(move |i| self.string(i))
    }

    /// `r · x mod m` for the input at `index`.
    pub fn dot(&self, mask: &Mask, index: usize) -> u32 {
        let m = self.m as u64;
        let s = mask
            .components
            .iter()
            .enumerate()
            .map(|(p, &r)| r as u64 * self.digit(index, p) as u64)
            .sum::<u64>();
        (s % m) as u32
    }
}

/// One input string `x = x_1 … x_n` over `Z_m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InputString {
    digits: Vec<u32>,
    m: u32,
}

impl InputString {
    pub fn new(digits: Vec<u32>, m: u32) -> Result<Self> {
        if digits.is_empty() || m < 2 {
            return Err(ZmodError::InvalidSize { n: digits.len(), m });
        }
        if let Some(&digit) = digits.iter().find(|&&d| d >= m) {
            return Err(ZmodError::DigitOutOfRange { digit, m });
        }
        Ok(Self { digits, m })
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn n(&self) -> usize {
        self.digits.len()
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Digit `x_y` for a one-based question `y`.
    pub fn query(&self, y: usize) -> u32 {
        self.digits[y - 1]
    }

    /// Parses the comma-separated form used as a key in strategy files.
    pub fn parse(key: &str, m: u32) -> Result<Self> {
        let digits = key
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| ZmodError::InvalidSize { n: 0, m })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(digits, m)
    }
}

impl fmt::Display for InputString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.digits.iter().map(|d| d.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// All `m^n` strings in lexicographic order.
pub fn enumerate_inputs(n: usize, m: u32) -> Result<Vec<InputString>> {
    let space = InputSpace::new(n, m)?;
    Ok(space.strings().collect())
}

/// A vector `r ∈ Z_m^n` defining the parity `r · x mod m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mask {
    components: Vec<u32>,
    weight: usize,
    m: u32,
}

impl Mask {
    pub fn new(components: Vec<u32>, m: u32) -> Result<Self> {
        if components.is_empty() || m < 2 {
            return Err(ZmodError::InvalidSize {
                n: components.len(),
                m,
            });
        }
        if let Some(&digit) = components.iter().find(|&&c| c >= m) {
            return Err(ZmodError::DigitOutOfRange { digit, m });
        }
        let weight = components.iter().filter(|&&c| c != 0).count();
        Ok(Self {
            components,
            weight,
            m,
        })
    }

    pub fn components(&self) -> &[u32] {
        &self.components
    }

    pub fn weight(&self) -> usize {
        self.weight
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> usize {
        self.components.len()
    }

    pub fn is_zero(&self) -> bool {
        self.weight == 0
    }

    pub fn dot(&self, digits: &[u32]) -> u32 {
        let s: u64 = self
            .components
            .iter()
            .zip(digits)
            .map(|(&r, &x)| r as u64 * x as u64)
            .sum();
        (s % self.m as u64) as u32
    }

    pub fn scaled(&self, c: u32) -> Mask {
        let m = self.m as u64;
        let components = self
            .components
            .iter()
            .map(|&r| ((r as u64 * c as u64) % m) as u32)
            .collect();
        Mask::new(components, self.m).expect("scaled components stay in range")
    }

    /// Representative of the scalar orbit whose first nonzero component is 1.
    pub fn canonical(&self) -> Result<Mask> {
        let first = *self
            .components
            .iter()
            .find(|&&c| c != 0)
            .ok_or(ZmodError::ZeroMask)?;
        let inv = inverse_mod(first, self.m).ok_or(ZmodError::NotPrime(self.m))?;
        Ok(self.scaled(inv))
    }

    pub fn is_canonical(&self) -> bool {
        self.components.iter().find(|&&c| c != 0) == Some(&1)
    }
}

impl fmt::Display for Mask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.components.iter().map(|d| d.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Masks of weight at least two, in lexicographic order. With
/// `reduce_by_scalars` only the canonical member of each `Z_m^×` orbit is kept.
pub fn enumerate_parity_masks(n: usize, m: u32, reduce_by_scalars: bool) -> Result<Vec<Mask>> {
    if !is_prime(m) {
        return Err(ZmodError::NotPrime(m));
    }
    if n < 2 {
        return Err(ZmodError::TooFewDigits(n));
    }
    let space = InputSpace::new(n, m)?;
    let mut masks = Vec::new();
    for i in 0..space.size() {
        let mask = Mask::new(space.digits(i), m)?;
        if mask.weight() < 2 {
            continue;
        }
        if reduce_by_scalars && !mask.is_canonical() {
            continue;
        }
        masks.push(mask);
    }
    Ok(masks)
}

/// Partition of `Z_m^n` into the classes `C_k = {x : r · x ≡ k}`.
#[derive(Clone, Debug)]
pub struct ParityClassTable {
    mask: Mask,
    space: InputSpace,
    classes: Vec<Vec<usize>>,
}

impl ParityClassTable {
    pub fn mask(&self) -> &Mask {
        &self.mask
    }

    pub fn space(&self) -> InputSpace {
        self.space
    }

    /// Input indices of class `k`.
    pub fn class_indices(&self, k: u32) -> &[usize] {
        &self.classes[k as usize]
    }

    pub fn class(&self, k: u32) -> Vec<InputString> {
        self.classes[k as usize]
            .iter()
            .map(|&i| self.space.string(i))
            .collect()
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }
}

pub fn parity_classes(mask: &Mask) -> Result<ParityClassTable> {
    if mask.is_zero() {
        return Err(ZmodError::ZeroMask);
    }
    let space = InputSpace::new(mask.n(), mask.m())?;
    let mut classes = vec![Vec::new(); mask.m() as usize];
    for i in 0..space.size() {
        classes[space.dot(mask, i) as usize].push(i);
    }
    Ok(ParityClassTable {
        mask: mask.clone(),
        space,
        classes,
    })
}

/// Fourier coefficients `f̂(r) = m^{-n} Σ_x f(x) ω^{-r·x}`, dense over all
/// masks `r`, each coefficient a vector of `width` components.
#[derive(Clone, Debug)]
pub struct FourierSpectrum {
    space: InputSpace,
    width: usize,
    coefficients: Vec<Complex64>,
}

impl FourierSpectrum {
    pub fn space(&self) -> InputSpace {
        self.space
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Coefficient vector at the mask with lexicographic index `r`.
    pub fn coefficient(&self, r: usize) -> &[Complex64] {
        &self.coefficients[r * self.width..(r + 1) * self.width]
    }

    pub fn coefficient_at(&self, mask: &Mask) -> &[Complex64] {
        self.coefficient(self.space.index(mask.components()))
    }

    /// Weight (number of nonzero components) of the mask at index `r`.
    pub fn mask_weight(&self, r: usize) -> usize {
        (0..self.space.n())
            .filter(|&p| self.space.digit(r, p) != 0)
            .count()
    }

    /// Zeroes every coefficient at masks of weight two or more.
    pub fn zero_mixed_modes(&mut self) {
        for r in 0..self.space.size() {
            if self.mask_weight(r) >= 2 {
                for c in &mut self.coefficients[r * self.width..(r + 1) * self.width] {
                    *c = Complex64::new(0.0, 0.0);
                }
            }
        }
    }

    /// Reconstructs `f(x) = Σ_r f̂(r) ω^{r·x}`, flattened `width` values per input.
    pub fn inverse(&self) -> Vec<Complex64> {
        let mut data = self.coefficients.clone();
        separable_dft(self.space, self.width, &mut data, 1.0);
        data
    }
}

/// Transform of a scalar function given as one value per input.
pub fn fourier_transform(space: InputSpace, values: &[Complex64]) -> Result<FourierSpectrum> {
    fourier_transform_flat(space, values, 1)
}

/// Transform of a vector-valued function, `width` values per input.
pub fn fourier_transform_flat(
    space: InputSpace,
    values: &[Complex64],
    width: usize,
) -> Result<FourierSpectrum> {
    if width == 0 || values.len() != space.size() * width {
        return Err(ZmodError::PartialDomain {
            expected: space.size(),
            got: values.len() / width.max(1),
        });
    }
    let mut data = values.to_vec();
    separable_dft(space, width, &mut data, -1.0);
    let scale = 1.0 / space.size() as f64;
    for c in &mut data {
        *c *= scale;
    }
    Ok(FourierSpectrum {
        space,
        width,
        coefficients: data,
    })
}

pub fn fourier_transform_vectors(
    space: InputSpace,
    values: &[Vec<Complex64>],
) -> Result<FourierSpectrum> {
    if values.len() != space.size() {
        return Err(ZmodError::PartialDomain {
            expected: space.size(),
            got: values.len(),
        });
    }
    let width = values.first().map_or(0, Vec::len);
    let flat: Vec<Complex64> = values.iter().flatten().copied().collect();
    fourier_transform_flat(space, &flat, width)
}

// One length-m DFT along every axis in turn; `sign` selects ω^{±r·x}.
fn separable_dft(space: InputSpace, width: usize, data: &mut [Complex64], sign: f64) {
    let m = space.m() as usize;
    let roots: Vec<Complex64> = (0..m)
        .map(|k| Complex64::from_polar(1.0, sign * 2.0 * PI * k as f64 / m as f64))
        .collect();
    let mut line = vec![Complex64::new(0.0, 0.0); m];
    for axis in 0..space.n() {
        let stride = space.stride(axis);
        for base in 0..space.size() {
            if space.digit(base, axis) != 0 {
                continue;
            }
            for w in 0..width {
                for (x, slot) in line.iter_mut().enumerate() {
                    *slot = data[(base + x * stride) * width + w];
                }
                for r in 0..m {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (x, v) in line.iter().enumerate() {
                        acc += v * roots[(r * x) % m];
                    }
                    data[(base + r * stride) * width + w] = acc;
                }
            }
        }
    }
}

/// Largest coefficient modulus over masks of weight at least two.
pub fn mixed_mode_mass(spectrum: &FourierSpectrum) -> f64 {
    (0..spectrum.space.size())
        .filter(|&r| spectrum.mask_weight(r) >= 2)
        .flat_map(|r| spectrum.coefficient(r).iter().map(|c| c.norm()))
        .fold(0.0, f64::max)
}

/// Orthogonal projection onto functions of the form `c + Σ_i g_i(x_i)`,
/// in place, `width` values per input. Equivalent to zeroing every mixed
/// Fourier mode, computed from single-digit conditional means.
pub fn project_additive<T>(space: InputSpace, values: &mut [T], width: usize)
where
    T: Copy + Default + std::ops::AddAssign + std::ops::Mul<f64, Output = T>,
{
    let n = space.n();
    let m = space.m() as usize;
    let fiber = 1.0 / (space.size() / m) as f64;
    let mut means = vec![T::default(); n * m * width];
    let mut grand = vec![T::default(); width];
    for x in 0..space.size() {
        let row = &values[x * width..(x + 1) * width];
        for axis in 0..n {
            let l = space.digit(x, axis) as usize;
            let slot = &mut means[(axis * m + l) * width..(axis * m + l + 1) * width];
            for (s, &v) in slot.iter_mut().zip(row) {
                *s += v;
            }
        }
        for (g, &v) in grand.iter_mut().zip(row) {
            *g += v;
        }
    }
    for v in &mut means {
        *v = *v * fiber;
    }
    let grand_scale = -((n - 1) as f64) / space.size() as f64;
    for g in &mut grand {
        *g = *g * grand_scale;
    }
    for x in 0..space.size() {
        let row = &mut values[x * width..(x + 1) * width];
        row.copy_from_slice(&grand);
        for axis in 0..n {
            let l = space.digit(x, axis) as usize;
            let slot = &means[(axis * m + l) * width..(axis * m + l + 1) * width];
            for (r, &v) in row.iter_mut().zip(slot) {
                *r += v;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn enumerates_base_cases() {
        let xs = enumerate_inputs(1, 2).unwrap();
        assert_eq!(xs.len(), 2);
        assert_eq!(xs[0].digits(), &[0]);
        assert_eq!(xs[1].digits(), &[1]);

        let xs = enumerate_inputs(2, 3).unwrap();
        assert_eq!(xs.len(), 9);
        let head: Vec<&[u32]> = xs.iter().take(4).map(|x| x.digits()).collect();
        assert_eq!(head, vec![&[0, 0][..], &[0, 1], &[0, 2], &[1, 0]]);

        assert_eq!(enumerate_inputs(3, 5).unwrap().len(), 125);
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        assert!(matches!(
            enumerate_inputs(24, 2),
            Err(ZmodError::SizeOverflow { .. })
        ));
        assert!(InputSpace::new(7, 10).is_ok());
        assert!(InputSpace::new(8, 10).is_err());
        assert!(InputSpace::new(0, 3).is_err());
        assert!(InputSpace::new(2, 1).is_err());
    }

    #[test]
    fn reduced_masks_for_two_trits() {
        let masks = enumerate_parity_masks(2, 3, true).unwrap();
        let comps: Vec<&[u32]> = masks.iter().map(|r| r.components()).collect();
        assert_eq!(comps, vec![&[1, 1][..], &[1, 2]]);
    }

    #[test]
    fn unreduced_masks_for_two_trits() {
        let masks = enumerate_parity_masks(2, 3, false).unwrap();
        let comps: Vec<&[u32]> = masks.iter().map(|r| r.components()).collect();
        assert_eq!(comps, vec![&[1, 1][..], &[1, 2], &[2, 1], &[2, 2]]);
    }

    #[test]
    fn reduced_masks_for_two_quints() {
        let masks = enumerate_parity_masks(2, 5, true).unwrap();
        let comps: Vec<Vec<u32>> = masks.iter().map(|r| r.components().to_vec()).collect();
        assert_eq!(comps, vec![vec![1, 1], vec![1, 2], vec![1, 3], vec![1, 4]]);
    }

    #[test]
    fn composite_symbol_size_is_rejected() {
        assert_eq!(
            enumerate_parity_masks(2, 4, true).unwrap_err(),
            ZmodError::NotPrime(4)
        );
        assert_eq!(
            enumerate_parity_masks(1, 3, true).unwrap_err(),
            ZmodError::TooFewDigits(1)
        );
    }

    #[test]
    fn listed_parity_classes() {
        let r11 = Mask::new(vec![1, 1], 3).unwrap();
        let t = parity_classes(&r11).unwrap();
        let k0: Vec<Vec<u32>> = t.class(0).iter().map(|x| x.digits().to_vec()).collect();
        assert_eq!(k0, vec![vec![0, 0], vec![1, 2], vec![2, 1]]);

        let r12 = Mask::new(vec![1, 2], 3).unwrap();
        let t = parity_classes(&r12).unwrap();
        let k0: Vec<Vec<u32>> = t.class(0).iter().map(|x| x.digits().to_vec()).collect();
        assert_eq!(k0, vec![vec![0, 0], vec![1, 1], vec![2, 2]]);

        let r10 = Mask::new(vec![1, 0], 3).unwrap();
        let t = parity_classes(&r10).unwrap();
        let k2: Vec<Vec<u32>> = t.class(2).iter().map(|x| x.digits().to_vec()).collect();
        assert_eq!(k2, vec![vec![2, 0], vec![2, 1], vec![2, 2]]);
    }

    #[test]
    fn zero_mask_has_no_classes() {
        let zero = Mask::new(vec![0, 0], 3).unwrap();
        assert_eq!(parity_classes(&zero).unwrap_err(), ZmodError::ZeroMask);
    }

    #[test]
    fn canonical_representative() {
        let r = Mask::new(vec![0, 3, 1], 5).unwrap();
        assert_eq!(r.canonical().unwrap().components(), &[0, 1, 2]);
    }

    #[test]
    fn constant_function_has_only_the_zero_mode() {
        let space = InputSpace::new(2, 3).unwrap();
        let f = vec![Complex64::new(0.7, -0.2); 9];
        let s = fourier_transform(space, &f).unwrap();
        assert!((s.coefficient(0)[0] - Complex64::new(0.7, -0.2)).norm() < 1e-14);
        for r in 1..9 {
            assert!(s.coefficient(r)[0].norm() < 1e-14);
        }
        assert!(mixed_mode_mass(&s) < 1e-14);
    }

    #[test]
    fn partial_domain_is_rejected() {
        let space = InputSpace::new(2, 3).unwrap();
        assert!(matches!(
            fourier_transform(space, &[c(1.0); 8]),
            Err(ZmodError::PartialDomain { .. })
        ));
    }

    #[test]
    fn projection_matches_mode_zeroing() {
        let space = InputSpace::new(3, 3).unwrap();
        let f: Vec<Complex64> = (0..27)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 1.3).cos()))
            .collect();
        let mut spec = fourier_transform(space, &f).unwrap();
        spec.zero_mixed_modes();
        let zeroed = spec.inverse();
        let mut projected = f.clone();
        project_additive(space, &mut projected, 1);
        for (a, b) in zeroed.iter().zip(&projected) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    // Direct O(m^{2n}) summation of the transform definition.
    fn naive_transform(space: InputSpace, f: &[Complex64]) -> Vec<Complex64> {
        let m = space.m() as f64;
        (0..space.size())
            .map(|r| {
                let mask = space.digits(r);
                let mut acc = Complex64::new(0.0, 0.0);
                for (x, v) in f.iter().enumerate() {
                    let dot: u32 = mask
                        .iter()
                        .zip(space.digits(x))
                        .map(|(a, b)| a * b)
                        .sum::<u32>()
                        % space.m();
                    acc += v * Complex64::from_polar(1.0, -2.0 * PI * dot as f64 / m);
                }
                acc / space.size() as f64
            })
            .collect()
    }

    #[test]
    fn single_character_lands_on_one_mode() {
        let space = InputSpace::new(2, 3).unwrap();
        for (sign, peak) in [(1.0, [1, 0]), (-1.0, [2, 0])] {
            let f: Vec<Complex64> = (0..9)
                .map(|x| {
                    let x1 = space.digit(x, 0) as f64;
                    Complex64::from_polar(1.0, sign * 2.0 * PI * x1 / 3.0)
                })
                .collect();
            let fast = fourier_transform(space, &f).unwrap();
            let slow = naive_transform(space, &f);
            let at = space.index(&peak);
            for (r, s) in slow.iter().enumerate() {
                assert!((fast.coefficient(r)[0] - s).norm() < 1e-14);
                let want = if r == at { 1.0 } else { 0.0 };
                assert!((s.norm() - want).abs() < 1e-14);
            }
        }
    }
}
