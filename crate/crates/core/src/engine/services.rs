use std::collections::HashMap;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ServiceError {
    #[error("no value for service call {0}")]
    NoValue(String),
}

/// Concrete service implementation used in simulation mode. Must be a pure
/// function of its arguments for the duration of a run.
pub trait ServiceBackend: Send + Sync {
    fn call(&self, func: &str, args: &[&str]) -> Result<String, ServiceError>;
}

/// Looks calls up in a fixed table.
#[derive(Debug, Clone, Default)]
pub struct TableBackend {
    table: HashMap<(String, Vec<String>), String>,
}

impl TableBackend {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, func: &str, args: &[&str], value: &str) -> Self {
        self.insert(func, args, value);
        self
    }

    pub fn insert(&mut self, func: &str, args: &[&str], value: &str) {
        self.table.insert(
            (
                func.to_string(),
                args.iter().map(|a| a.to_string()).collect(),
            ),
            value.to_string(),
        );
    }
}

impl ServiceBackend for TableBackend {
    fn call(&self, func: &str, args: &[&str]) -> Result<String, ServiceError> {
        let key = (
            func.to_string(),
            args.iter().map(|a| a.to_string()).collect(),
        );
        self.table
            .get(&key)
            .cloned()
            .ok_or_else(|| ServiceError::NoValue(format!("{func}({})", args.join(", "))))
    }
}

/// Maps each call to a constant chosen by a seeded FNV-1a hash of the call.
/// With a non-empty codomain the result is one of its members, otherwise a
/// synthesized constant `h<hex>`.
#[derive(Debug, Clone)]
pub struct HashBackend {
    seed: u64,
    codomain: Vec<String>,
}

impl HashBackend {
    pub fn new(seed: u64, codomain: Vec<String>) -> Self {
        HashBackend { seed, codomain }
    }

    fn hash(&self, func: &str, args: &[&str]) -> u64 {
        const PRIME: u64 = 0x0000_0100_0000_01b3;
        let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ self.seed;
        let mut feed = |bytes: &[u8]| {
            for b in bytes {
                h ^= u64::from(*b);
                h = h.wrapping_mul(PRIME);
            }
            h ^= 0xff;
            h = h.wrapping_mul(PRIME);
        };
        feed(func.as_bytes());
        for a in args {
            feed(a.as_bytes());
        }
        h
    }
}

impl ServiceBackend for HashBackend {
    fn call(&self, func: &str, args: &[&str]) -> Result<String, ServiceError> {
        let h = self.hash(func, args);
        if self.codomain.is_empty() {
            Ok(format!("h{:08x}", h as u32))
        } else {
            Ok(self.codomain[(h % self.codomain.len() as u64) as usize].clone())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_lookup() {
        let b = TableBackend::new().with("newTTD", &["w1", "t5"], "t9");
        assert_eq!(b.call("newTTD", &["w1", "t5"]).unwrap(), "t9");
        assert!(b.call("newTTD", &["w1", "t9"]).is_err());
    }

    #[test]
    fn hash_is_pure_and_seeded() {
        let b = HashBackend::new(7, vec!["t5".into(), "t9".into(), "t11".into()]);
        let v = b.call("newTTD", &["w1", "t5"]).unwrap();
        for _ in 0..5 {
            assert_eq!(b.call("newTTD", &["w1", "t5"]).unwrap(), v);
        }
        assert!(["t5", "t9", "t11"].contains(&v.as_str()));
        let free = HashBackend::new(7, vec![]);
        assert!(free.call("f", &["a"]).unwrap().starts_with('h'));
        let outputs: std::collections::BTreeSet<String> = (0..20)
            .map(|s| HashBackend::new(s, vec![]).call("f", &["a"]).unwrap())
            .collect();
        assert!(outputs.len() > 1);
    }
}
