use super::packed::byte_width_for_bound;
use super::CompressionError;

/// Fixed-width dictionary encoding for categorical values.
///
/// The domain is kept sorted, so codes are assigned in lexicographic order and
/// building the same value set always yields the same codes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dictionary {
    domain: Vec<String>,
    code_width: u8,
}

impl Dictionary {
    pub fn build<'a, I>(values: I) -> Result<Self, CompressionError>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut domain: Vec<String> = values.into_iter().map(str::to_owned).collect();
        domain.sort_unstable();
        domain.dedup();
        Self::from_sorted_domain(domain)
    }

    pub(crate) fn from_sorted_domain(domain: Vec<String>) -> Result<Self, CompressionError> {
        if domain.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CompressionError::Corrupt);
        }
        let code_width = byte_width_for_bound(domain.len() as u64);
        if code_width > 4 {
            return Err(CompressionError::DomainTooLarge(domain.len()));
        }
        Ok(Self { domain, code_width })
    }

    pub fn encode(&self, value: &str) -> Result<u32, CompressionError> {
        self.domain
            .binary_search_by(|probe| probe.as_str().cmp(value))
            .map(|i| i as u32)
            .map_err(|_| CompressionError::ValueNotInDomain(value.to_owned()))
    }

    pub fn decode(&self, code: u32) -> Result<&str, CompressionError> {
        self.domain
            .get(code as usize)
            .map(String::as_str)
            .ok_or(CompressionError::CodeOutOfRange(code))
    }

    #[inline]
    pub(crate) fn decode_unchecked(&self, code: u32) -> &str {
        &self.domain[code as usize]
    }

    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    /// Bytes per code: `ceil(log2(max(2, z)) / 8)`.
    pub fn code_width(&self) -> u8 {
        self.code_width
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn heap_bytes(&self) -> usize {
        self.domain.iter().map(|s| s.len()).sum::<usize>() + self.domain.len() * std::mem::size_of::<String>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_values() {
        let d = Dictionary::build(["m", "f", "m"]).unwrap();
        assert_eq!(d.code_width(), 1);
        assert_eq!(d.encode("f").unwrap(), 0);
        assert_eq!(d.encode("m").unwrap(), 1);
        assert_eq!(d.decode(1).unwrap(), "m");
    }

    #[test]
    fn width_grows_past_256() {
        let vals: Vec<String> = (0..257).map(|i| format!("v{i:04}")).collect();
        let d = Dictionary::build(vals.iter().map(String::as_str)).unwrap();
        assert_eq!(d.len(), 257);
        assert_eq!(d.code_width(), 2);
        let vals: Vec<String> = (0..256).map(|i| format!("v{i:04}")).collect();
        assert_eq!(
            Dictionary::build(vals.iter().map(String::as_str)).unwrap().code_width(),
            1
        );
    }

    #[test]
    fn singleton_and_errors() {
        let d = Dictionary::build(["only"]).unwrap();
        assert_eq!(d.code_width(), 1);
        assert_eq!(d.encode("only").unwrap(), 0);
        assert!(matches!(d.encode("other"), Err(CompressionError::ValueNotInDomain(_))));
        assert!(matches!(d.decode(1), Err(CompressionError::CodeOutOfRange(1))));
    }
}
