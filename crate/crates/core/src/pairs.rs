use serde::Serialize;

/// Values indexed by unordered group pairs `i < l` out of `k` groups.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairMap<T> {
    k: usize,
    values: Vec<T>,
}

impl<T> PairMap<T> {
    /// Builds the map by evaluating `f(i, l)` for every pair in lexicographic order.
    pub fn try_from_fn<E>(k: usize, mut f: impl FnMut(usize, usize) -> Result<T, E>) -> Result<Self, E> {
        let mut values = Vec::with_capacity(k * k.saturating_sub(1) / 2);
        for i in 0..k {
            for l in i + 1..k {
                values.push(f(i, l)?);
            }
        }
        Ok(Self { k, values })
    }

    pub fn from_fn(k: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        Self::try_from_fn::<std::convert::Infallible>(k, |i, l| Ok(f(i, l))).unwrap()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn index(&self, i: usize, l: usize) -> usize {
        let (i, l) = if i < l { (i, l) } else { (l, i) };
        assert!(i != l && l < self.k, "invalid pair ({i}, {l}) for k = {}", self.k);
        // Pairs before row i: (k-1) + (k-2) + ... + (k-i)
        i * (2 * self.k - i - 1) / 2 + (l - i - 1)
    }

    /// Value for the pair `{i, l}`; order of the arguments does not matter.
    pub fn get(&self, i: usize, l: usize) -> &T {
        &self.values[self.index(i, l)]
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &T)> + '_ {
        let k = self.k;
        (0..k)
            .flat_map(move |i| (i + 1..k).map(move |l| (i, l)))
            .zip(self.values.iter())
            .map(|((i, l), v)| (i, l, v))
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }
}
