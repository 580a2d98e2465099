//! MinHash and weighted MinHash (ICWS) signatures.
//!
//! Binary sets are hashed with the multiply-add family
//! `h_i(x) = (a_i * key(x) + b_i) mod (2^61 - 1)`, where `key` is a fixed
//! bijective scramble of the element; a component is the minimum of `h_i`
//! over the set, so two signatures agree at position `i` with probability
//! equal to the sets' Jaccard similarity. Without the scramble the linear
//! family is biased on runs of consecutive elements (pixel indices, k-mers).
//!
//! Non-negative vectors use Improved Consistent Weighted Sampling. Each
//! component packs the sampled dimension and its quantization level into one
//! `u64`, and two components collide with probability equal to the weighted
//! Jaccard similarity `sum(min(u, v)) / sum(max(u, v))`.

use thiserror::Error;

use crate::exec::Exec;
use crate::rng::CounterRng;

/// Mersenne prime `2^61 - 1`, modulus of the binary hash family.
pub const MERSENNE_61: u64 = (1 << 61) - 1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HashingError {
    #[error("empty set: an item with no elements has undefined Jaccard similarity")]
    EmptySet,
    #[error("set elements must be strictly ascending (violated at position {position})")]
    NotAscending { position: usize },
    #[error("weight {index} is negative ({value})")]
    NegativeWeight { index: usize, value: f64 },
    #[error("weight {index} is not finite")]
    NonFiniteWeight { index: usize },
    #[error("vector has no positive weight")]
    ZeroVector,
    #[error("vector has dimension {found}, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("signature modes differ")]
    ModeMismatch,
    #[error("signature lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("invalid hashing config: {0}")]
    InvalidConfig(&'static str),
    #[error("encoder is configured for {expected:?} mode")]
    WrongMode { expected: HashMode },
}

/// A non-empty set of `u32` elements in strictly ascending order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SparseBinarySet(Vec<u32>);

impl SparseBinarySet {
    pub fn new(elements: Vec<u32>) -> Result<Self, HashingError> {
        if elements.is_empty() {
            return Err(HashingError::EmptySet);
        }
        if let Some(p) = elements.windows(2).position(|w| w[0] >= w[1]) {
            return Err(HashingError::NotAscending { position: p + 1 });
        }
        Ok(SparseBinarySet(elements))
    }

    /// Sorts and deduplicates arbitrary elements.
    pub fn from_unsorted(mut elements: Vec<u32>) -> Result<Self, HashingError> {
        elements.sort_unstable();
        elements.dedup();
        Self::new(elements)
    }

    pub fn elements(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn max_element(&self) -> u32 {
        *self.0.last().expect("non-empty by construction")
    }
}

/// A dense vector of finite, non-negative weights with at least one positive entry.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedVector(Vec<f64>);

impl WeightedVector {
    pub fn new(weights: Vec<f64>) -> Result<Self, HashingError> {
        for (index, &value) in weights.iter().enumerate() {
            if !value.is_finite() {
                return Err(HashingError::NonFiniteWeight { index });
            }
            if value < 0.0 {
                return Err(HashingError::NegativeWeight { index, value });
            }
        }
        if !weights.iter().any(|&w| w > 0.0) {
            return Err(HashingError::ZeroVector);
        }
        Ok(WeightedVector(weights))
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Indices of the positive weights, i.e. the support as a set.
    pub fn support(&self) -> SparseBinarySet {
        let elems = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0)
            .map(|(j, _)| j as u32)
            .collect();
        SparseBinarySet(elems)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HashMode {
    Binary,
    Weighted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HashingConfig {
    /// Number of hash functions (signature length).
    pub d: usize,
    pub seed: u64,
    pub mode: HashMode,
    /// Input dimensionality; only used in weighted mode.
    pub dim: usize,
}

impl HashingConfig {
    pub fn binary(d: usize, seed: u64) -> Self {
        HashingConfig {
            d,
            seed,
            mode: HashMode::Binary,
            dim: 0,
        }
    }

    pub fn weighted(d: usize, dim: usize, seed: u64) -> Self {
        HashingConfig {
            d,
            seed,
            mode: HashMode::Weighted,
            dim,
        }
    }

    pub fn validate(&self) -> Result<(), HashingError> {
        if self.d == 0 {
            return Err(HashingError::InvalidConfig("d must be at least 1"));
        }
        if self.mode == HashMode::Weighted && self.dim == 0 {
            return Err(HashingError::InvalidConfig("dim must be at least 1 in weighted mode"));
        }
        Ok(())
    }
}

/// Parameters of the hash family, derived deterministically from a config.
#[derive(Debug, Clone, PartialEq)]
pub enum HashParams {
    /// `d` multiply-add pairs with `a in [1, P)` and `b in [0, P)`.
    Binary { a: Vec<u64>, b: Vec<u64> },
    /// Per-(sample, dimension) randomness is a pure function of the key and
    /// is generated on demand.
    Weighted(IcwsParams),
}

/// Functional ICWS parameters: `(r, c, beta)` for every (sample, dimension).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IcwsParams {
    seed: u64,
    d: usize,
    dim: usize,
}

/// `(r, c, beta)` with `r, c ~ Gamma(2, 1)` and `beta ~ Uniform(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IcwsDraw {
    pub r: f64,
    pub c: f64,
    pub beta: f64,
}

impl IcwsParams {
    fn sample_rng(&self, sample: usize) -> CounterRng {
        CounterRng::new(self.seed).substream(sample as u64)
    }

    #[inline]
    fn draw_from(rng: &CounterRng, dim_index: usize) -> IcwsDraw {
        let base = dim_index as u64 * 5;
        // Gamma(2, 1) as the sum of two Exponential(1) draws.
        let r = -rng.open_unit_at(base).ln() - rng.open_unit_at(base + 1).ln();
        let c = -rng.open_unit_at(base + 2).ln() - rng.open_unit_at(base + 3).ln();
        let beta = rng.unit_at(base + 4);
        IcwsDraw { r, c, beta }
    }

    pub fn draw(&self, sample: usize, dim_index: usize) -> IcwsDraw {
        Self::draw_from(&self.sample_rng(sample), dim_index)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

pub fn derive_hash_params(config: &HashingConfig) -> HashParams {
    match config.mode {
        HashMode::Binary => {
            let rng = CounterRng::new(config.seed);
            let mut a = Vec::with_capacity(config.d);
            let mut b = Vec::with_capacity(config.d);
            for i in 0..config.d {
                let s = rng.substream(i as u64);
                a.push(1 + s.u64_at(0) % (MERSENNE_61 - 1));
                b.push(s.u64_at(1) % MERSENNE_61);
            }
            HashParams::Binary { a, b }
        }
        HashMode::Weighted => HashParams::Weighted(IcwsParams {
            seed: config.seed,
            d: config.d,
            dim: config.dim,
        }),
    }
}

#[inline]
fn reduce_mersenne(x: u128) -> u64 {
    let lo = (x as u64) & MERSENNE_61;
    let hi = (x >> 61) as u64;
    let mut r = lo + hi;
    // hi < 2^62 here, so two conditional subtractions suffice.
    if r >= MERSENNE_61 {
        r -= MERSENNE_61;
    }
    if r >= MERSENNE_61 {
        r -= MERSENNE_61;
    }
    r
}

/// Fixed bijective scramble of a `u32` element (xorshift-multiply rounds).
#[inline]
pub fn element_key(x: u32) -> u64 {
    let mut z = x;
    z ^= z >> 16;
    z = z.wrapping_mul(0x7feb_352d);
    z ^= z >> 15;
    z = z.wrapping_mul(0x846c_a68b);
    z ^= z >> 16;
    z as u64
}

/// `(a * key + b) mod (2^61 - 1)` for a key below `2^61`.
#[inline]
pub fn mersenne_hash(a: u64, b: u64, key: u64) -> u64 {
    reduce_mersenne(a as u128 * key as u128 + b as u128)
}

/// A d-component sketch of one item.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Signature {
    pub mode: HashMode,
    pub components: Vec<u64>,
}

impl Signature {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

#[inline]
fn zigzag(t: i32) -> u32 {
    ((t << 1) ^ (t >> 31)) as u32
}

#[inline]
fn unzigzag(z: u32) -> i32 {
    ((z >> 1) as i32) ^ -((z & 1) as i32)
}

/// Packs a weighted sample: dimension in the high 32 bits, zigzag-encoded
/// level in the low 32 bits.
#[inline]
pub fn pack_weighted(dim_index: u32, level: i32) -> u64 {
    ((dim_index as u64) << 32) | zigzag(level) as u64
}

#[inline]
pub fn unpack_weighted(component: u64) -> (u32, i32) {
    ((component >> 32) as u32, unzigzag(component as u32))
}

/// Holds derived hash parameters and encodes items into signatures.
#[derive(Debug, Clone)]
pub struct Encoder {
    config: HashingConfig,
    params: HashParams,
}

impl Encoder {
    pub fn new(config: HashingConfig) -> Result<Self, HashingError> {
        config.validate()?;
        let params = derive_hash_params(&config);
        Ok(Encoder { config, params })
    }

    pub fn config(&self) -> &HashingConfig {
        &self.config
    }

    pub fn params(&self) -> &HashParams {
        &self.params
    }

    pub fn minhash(&self, set: &SparseBinarySet) -> Result<Signature, HashingError> {
        let mut components = vec![0; self.config.d];
        self.minhash_into(set, &mut components)?;
        Ok(Signature {
            mode: HashMode::Binary,
            components,
        })
    }

    fn minhash_into(&self, set: &SparseBinarySet, out: &mut [u64]) -> Result<(), HashingError> {
        let HashParams::Binary { a, b } = &self.params else {
            return Err(HashingError::WrongMode {
                expected: self.config.mode,
            });
        };
        let keys: Vec<u64> = set.elements().iter().map(|&x| element_key(x)).collect();
        for ((slot, &ai), &bi) in out.iter_mut().zip(a).zip(b) {
            *slot = keys
                .iter()
                .map(|&k| mersenne_hash(ai, bi, k))
                .min()
                .expect("non-empty set");
        }
        Ok(())
    }

    pub fn weighted_minhash(&self, vec: &WeightedVector) -> Result<Signature, HashingError> {
        let mut components = vec![0; self.config.d];
        self.weighted_into(vec, &mut components)?;
        Ok(Signature {
            mode: HashMode::Weighted,
            components,
        })
    }

    fn weighted_into(&self, vec: &WeightedVector, out: &mut [u64]) -> Result<(), HashingError> {
        let HashParams::Weighted(params) = &self.params else {
            return Err(HashingError::WrongMode {
                expected: self.config.mode,
            });
        };
        if vec.dim() != params.dim {
            return Err(HashingError::DimensionMismatch {
                expected: params.dim,
                found: vec.dim(),
            });
        }
        let support: Vec<(usize, f64)> = vec
            .weights()
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0)
            .map(|(j, &w)| (j, w.ln()))
            .collect();
        if support.is_empty() {
            return Err(HashingError::ZeroVector);
        }
        for (i, slot) in out.iter_mut().enumerate() {
            let rng = params.sample_rng(i);
            let mut best = (f64::INFINITY, 0usize, 0i64);
            for &(j, ln_w) in &support {
                let IcwsDraw { r, c, beta } = IcwsParams::draw_from(&rng, j);
                let t = (ln_w / r + beta).floor();
                let ln_y = r * (t - beta);
                let ln_a = c.ln() - ln_y - r;
                if ln_a < best.0 {
                    best = (ln_a, j, t as i64);
                }
            }
            let level = best.2.clamp(i32::MIN as i64, i32::MAX as i64) as i32;
            *slot = pack_weighted(best.1 as u32, level);
        }
        Ok(())
    }

    /// Encodes a batch of binary sets into a row-major signature matrix.
    pub fn encode_sets(&self, sets: &[SparseBinarySet], exec: Exec) -> Result<SignatureMatrix, HashingError> {
        let d = self.config.d;
        let mut data = vec![0u64; sets.len() * d];
        exec.try_fill_rows(&mut data, d, |i, row| self.minhash_into(&sets[i], row))?;
        Ok(SignatureMatrix {
            mode: HashMode::Binary,
            d,
            data,
        })
    }

    /// Encodes a batch of weighted vectors into a row-major signature matrix.
    pub fn encode_vectors(&self, vecs: &[WeightedVector], exec: Exec) -> Result<SignatureMatrix, HashingError> {
        let d = self.config.d;
        let mut data = vec![0u64; vecs.len() * d];
        exec.try_fill_rows(&mut data, d, |i, row| self.weighted_into(&vecs[i], row))?;
        Ok(SignatureMatrix {
            mode: HashMode::Weighted,
            d,
            data,
        })
    }
}

pub fn minhash_signature(set: &SparseBinarySet, config: &HashingConfig) -> Result<Signature, HashingError> {
    Encoder::new(config.clone())?.minhash(set)
}

pub fn weighted_minhash_signature(vec: &WeightedVector, config: &HashingConfig) -> Result<Signature, HashingError> {
    Encoder::new(config.clone())?.weighted_minhash(vec)
}

/// Number of positions where two equal-length component slices agree.
#[inline]
pub fn count_matches(a: &[u64], b: &[u64]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x == y).count()
}

/// Fraction of agreeing components; the estimated distance is `1 - estimate`.
pub fn estimate_jaccard(a: &Signature, b: &Signature) -> Result<f64, HashingError> {
    if a.mode != b.mode {
        return Err(HashingError::ModeMismatch);
    }
    if a.len() != b.len() {
        return Err(HashingError::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(HashingError::LengthMismatch(0, 0));
    }
    Ok(count_matches(&a.components, &b.components) as f64 / a.len() as f64)
}

/// `(|A ∩ B|, |A ∪ B|)` by sorted merge.
pub fn intersection_union(a: &SparseBinarySet, b: &SparseBinarySet) -> (usize, usize) {
    let (x, y) = (a.elements(), b.elements());
    let (mut i, mut j, mut inter) = (0, 0, 0);
    while i < x.len() && j < y.len() {
        match x[i].cmp(&y[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                inter += 1;
                i += 1;
                j += 1;
            }
        }
    }
    (inter, x.len() + y.len() - inter)
}

pub fn exact_jaccard(a: &SparseBinarySet, b: &SparseBinarySet) -> f64 {
    let (inter, union) = intersection_union(a, b);
    inter as f64 / union as f64
}

/// `sum(min(u, v)) / sum(max(u, v))`.
pub fn exact_weighted_jaccard(u: &WeightedVector, v: &WeightedVector) -> Result<f64, HashingError> {
    if u.dim() != v.dim() {
        return Err(HashingError::DimensionMismatch {
            expected: u.dim(),
            found: v.dim(),
        });
    }
    let (mut num, mut den) = (0.0, 0.0);
    for (&x, &y) in u.weights().iter().zip(v.weights()) {
        num += x.min(y);
        den += x.max(y);
    }
    Ok(num / den)
}

/// Row-major storage for `n` signatures of equal length and mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignatureMatrix {
    mode: HashMode,
    d: usize,
    data: Vec<u64>,
}

impl SignatureMatrix {
    pub fn from_signatures(signatures: &[Signature]) -> Result<Self, HashingError> {
        let first = signatures.first().ok_or(HashingError::InvalidConfig("no signatures"))?;
        let (mode, d) = (first.mode, first.len());
        if d == 0 {
            return Err(HashingError::InvalidConfig("empty signature"));
        }
        let mut data = Vec::with_capacity(d * signatures.len());
        for s in signatures {
            if s.mode != mode {
                return Err(HashingError::ModeMismatch);
            }
            if s.len() != d {
                return Err(HashingError::LengthMismatch(d, s.len()));
            }
            data.extend_from_slice(&s.components);
        }
        Ok(SignatureMatrix { mode, d, data })
    }

    pub fn mode(&self) -> HashMode {
        self.mode
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.d
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn signature(&self, i: usize) -> Signature {
        Signature {
            mode: self.mode,
            components: self.row(i).to_vec(),
        }
    }

    /// Number of agreeing components between rows `i` and `j`.
    #[inline]
    pub fn matches(&self, i: usize, j: usize) -> usize {
        count_matches(self.row(i), self.row(j))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[u32]) -> SparseBinarySet {
        SparseBinarySet::new(v.to_vec()).unwrap()
    }

    fn wv(v: &[f64]) -> WeightedVector {
        WeightedVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn set_invariants() {
        assert_eq!(SparseBinarySet::new(vec![]), Err(HashingError::EmptySet));
        assert_eq!(
            SparseBinarySet::new(vec![7, 3, 11]),
            Err(HashingError::NotAscending { position: 1 })
        );
        assert_eq!(
            SparseBinarySet::new(vec![1, 1]),
            Err(HashingError::NotAscending { position: 1 })
        );
        assert_eq!(SparseBinarySet::from_unsorted(vec![3, 1, 3]).unwrap().elements(), &[1, 3]);
    }

    #[test]
    fn weighted_vector_invariants() {
        assert_eq!(WeightedVector::new(vec![0.0, 0.0]), Err(HashingError::ZeroVector));
        assert!(matches!(
            WeightedVector::new(vec![1.0, -0.5]),
            Err(HashingError::NegativeWeight { index: 1, .. })
        ));
        assert_eq!(
            WeightedVector::new(vec![f64::NAN]),
            Err(HashingError::NonFiniteWeight { index: 0 })
        );
    }

    #[test]
    fn config_validation() {
        assert!(Encoder::new(HashingConfig::binary(0, 1)).is_err());
        assert!(Encoder::new(HashingConfig::weighted(8, 0, 1)).is_err());
    }

    #[test]
    fn params_are_deterministic() {
        let c = HashingConfig::binary(64, 9);
        assert_eq!(derive_hash_params(&c), derive_hash_params(&c));
    }

    #[test]
    fn params_differ_across_seeds() {
        let (HashParams::Binary { a: a1, .. }, HashParams::Binary { a: a2, .. }) = (
            derive_hash_params(&HashingConfig::binary(8, 1)),
            derive_hash_params(&HashingConfig::binary(8, 2)),
        ) else {
            unreachable!()
        };
        assert!(a1.iter().zip(&a2).any(|(x, y)| x != y));
    }

    #[test]
    fn binary_params_in_range() {
        let HashParams::Binary { a, b } = derive_hash_params(&HashingConfig::binary(512, 3)) else {
            unreachable!()
        };
        assert_eq!(a.len(), 512);
        assert_eq!(b.len(), 512);
        assert!(a.iter().all(|&x| (1..MERSENNE_61).contains(&x)));
        assert!(b.iter().all(|&x| x < MERSENNE_61));
    }

    #[test]
    fn mersenne_hash_matches_bigint_arithmetic() {
        let cases = [
            (MERSENNE_61 - 1, MERSENNE_61 - 1, u32::MAX as u64),
            (1, 0, 0),
            (123_456_789_012_345, 987_654_321, 4_000_000_000),
            (MERSENNE_61 - 1, MERSENNE_61 - 1, MERSENNE_61 - 1),
        ];
        for (a, b, x) in cases {
            let expect = ((a as u128 * x as u128 + b as u128) % MERSENNE_61 as u128) as u64;
            assert_eq!(mersenne_hash(a, b, x), expect);
        }
    }

    #[test]
    fn element_key_is_injective_on_a_dense_range() {
        let mut keys: Vec<u64> = (0..1 << 16).map(element_key).collect();
        keys.sort_unstable();
        keys.dedup();
        assert_eq!(keys.len(), 1 << 16);
        assert!(keys.iter().all(|&k| k <= u32::MAX as u64));
    }

    #[test]
    fn identical_sets_estimate_one() {
        let c = HashingConfig::binary(128, 5);
        let a = minhash_signature(&set(&[4, 8, 15, 16, 23, 42]), &c).unwrap();
        let b = minhash_signature(&set(&[4, 8, 15, 16, 23, 42]), &c).unwrap();
        assert_eq!(a, b);
        assert_eq!(estimate_jaccard(&a, &b).unwrap(), 1.0);
    }

    #[test]
    fn small_pair_estimate_within_binomial_bound() {
        // J({1,2},{2,3}) = 1/3 by enumeration; 3 * sqrt(J(1-J)/d) at d = 2048.
        let j = exact_jaccard(&set(&[1, 2]), &set(&[2, 3]));
        assert!((j - 1.0 / 3.0).abs() < 1e-15);
        let c = HashingConfig::binary(2048, 11);
        let a = minhash_signature(&set(&[1, 2]), &c).unwrap();
        let b = minhash_signature(&set(&[2, 3]), &c).unwrap();
        let est = estimate_jaccard(&a, &b).unwrap();
        let bound = 3.0 * (j * (1.0 - j) / 2048.0).sqrt();
        assert!((est - j).abs() <= bound, "est {est} bound {bound}");
    }

    #[test]
    fn exact_jaccard_cases() {
        assert_eq!(exact_jaccard(&set(&[1, 2, 3]), &set(&[1, 2, 3])), 1.0);
        assert_eq!(exact_jaccard(&set(&[1, 2]), &set(&[3, 4])), 0.0);
        assert_eq!(exact_jaccard(&set(&[1, 2, 3]), &set(&[2, 3, 4])), 0.5);
    }

    #[test]
    fn estimate_errors_and_extremes() {
        let a = Signature {
            mode: HashMode::Binary,
            components: vec![1, 2, 3],
        };
        let b = Signature {
            mode: HashMode::Binary,
            components: vec![4, 5, 6],
        };
        assert_eq!(estimate_jaccard(&a, &a).unwrap(), 1.0);
        assert_eq!(estimate_jaccard(&a, &b).unwrap(), 0.0);
        let w = Signature {
            mode: HashMode::Weighted,
            components: vec![1, 2, 3],
        };
        assert_eq!(estimate_jaccard(&a, &w), Err(HashingError::ModeMismatch));
        let short = Signature {
            mode: HashMode::Binary,
            components: vec![1],
        };
        assert_eq!(estimate_jaccard(&a, &short), Err(HashingError::LengthMismatch(3, 1)));
    }

    #[test]
    fn weighted_self_estimate_is_one() {
        let c = HashingConfig::weighted(256, 4, 1);
        let v = wv(&[0.5, 0.0, 2.0, 1.25]);
        let a = weighted_minhash_signature(&v, &c).unwrap();
        let b = weighted_minhash_signature(&v, &c).unwrap();
        assert_eq!(estimate_jaccard(&a, &b).unwrap(), 1.0);
    }

    #[test]
    fn weighted_scaled_vector_estimates_half() {
        // sum(min(v, 2v)) / sum(max(v, 2v)) = sum(v) / sum(2v) = 0.5.
        let c = HashingConfig::weighted(2048, 3, 17);
        let v = wv(&[1.0, 2.0, 3.0]);
        let v2 = wv(&[2.0, 4.0, 6.0]);
        assert!((exact_weighted_jaccard(&v, &v2).unwrap() - 0.5).abs() < 1e-15);
        let est = estimate_jaccard(
            &weighted_minhash_signature(&v, &c).unwrap(),
            &weighted_minhash_signature(&v2, &c).unwrap(),
        )
        .unwrap();
        assert!((est - 0.5).abs() <= 0.04, "{est}");
    }

    #[test]
    fn weighted_disjoint_support_never_collides() {
        let c = HashingConfig::weighted(2048, 2, 17);
        let a = weighted_minhash_signature(&wv(&[1.0, 0.0]), &c).unwrap();
        let b = weighted_minhash_signature(&wv(&[0.0, 1.0]), &c).unwrap();
        assert!(estimate_jaccard(&a, &b).unwrap() <= 0.01);
        assert!(a.components.iter().all(|&x| unpack_weighted(x).0 == 0));
        assert!(b.components.iter().all(|&x| unpack_weighted(x).0 == 1));
    }

    #[test]
    fn weighted_errors() {
        let enc = Encoder::new(HashingConfig::weighted(8, 3, 1)).unwrap();
        assert_eq!(
            enc.weighted_minhash(&wv(&[1.0])),
            Err(HashingError::DimensionMismatch { expected: 3, found: 1 })
        );
        assert!(matches!(enc.minhash(&set(&[1])), Err(HashingError::WrongMode { .. })));
    }

    #[test]
    fn scale_law_of_exact_weighted_jaccard() {
        let v = wv(&[0.3, 0.0, 1.7, 4.0]);
        for s in [1.0, 1.5, 2.0, 8.0] {
            let sv = wv(&v.weights().iter().map(|x| x * s).collect::<Vec<_>>());
            assert!((exact_weighted_jaccard(&v, &sv).unwrap() - 1.0 / s).abs() < 1e-12);
        }
    }

    #[test]
    fn packing_distinguishes_dimension_and_level() {
        assert_eq!(pack_weighted(3, -2), pack_weighted(3, -2));
        assert_ne!(pack_weighted(3, -2), pack_weighted(3, 2));
        assert_ne!(pack_weighted(3, 1), pack_weighted(4, 1));
        assert_ne!(pack_weighted(0, -1), pack_weighted(0, 0));
        for (j, t) in [(0, 0), (7, -1), (u32::MAX, i32::MIN), (12, i32::MAX)] {
            assert_eq!(unpack_weighted(pack_weighted(j, t)), (j, t));
        }
    }

    #[test]
    fn batch_encoding_matches_single() {
        let enc = Encoder::new(HashingConfig::binary(32, 2)).unwrap();
        let sets = vec![set(&[1, 5, 9]), set(&[2]), set(&[5, 9, 100])];
        let m = enc.encode_sets(&sets, Exec::default()).unwrap();
        for (i, s) in sets.iter().enumerate() {
            assert_eq!(m.signature(i), enc.minhash(s).unwrap());
        }
        assert_eq!(m, enc.encode_sets(&sets, Exec::Sequential).unwrap());
    }

    #[test]
    fn matrix_rejects_heterogeneous_signatures() {
        let a = Signature {
            mode: HashMode::Binary,
            components: vec![1, 2],
        };
        let b = Signature {
            mode: HashMode::Weighted,
            components: vec![1, 2],
        };
        assert_eq!(
            SignatureMatrix::from_signatures(&[a.clone(), b]),
            Err(HashingError::ModeMismatch)
        );
        let c = Signature {
            mode: HashMode::Binary,
            components: vec![1],
        };
        assert_eq!(
            SignatureMatrix::from_signatures(&[a, c]),
            Err(HashingError::LengthMismatch(2, 1))
        );
    }
}
