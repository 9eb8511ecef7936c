//! Content digests of models and strategies (SHA-256 over a canonical byte
//! encoding: register names and dimensions, then matrix entries as
//! little-endian `f64` bit patterns).

use sha2::{Digest, Sha256};

use crate::channels::KrausChannel;
use crate::linalg::Register;
use crate::rate::{ActionModel, Strategy};
use crate::scalar::{CMatrix, Real};

struct Hasher(Sha256);

impl Hasher {
    fn tag(&mut self, s: &str) {
        self.0.update((s.len() as u64).to_le_bytes());
        self.0.update(s.as_bytes());
    }

    fn num(&mut self, x: f64) {
        self.0.update(x.to_bits().to_le_bytes());
    }

    fn count(&mut self, n: usize) {
        self.0.update((n as u64).to_le_bytes());
    }

    fn register(&mut self, r: &Register) {
        self.count(r.len());
        for s in r.subsystems() {
            self.tag(&s.name);
            self.count(s.dim);
        }
    }

    fn matrix<T: Real>(&mut self, m: &CMatrix<T>) {
        self.count(m.nrows());
        self.count(m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                self.num(m[(i, j)].re.as_f64());
                self.num(m[(i, j)].im.as_f64());
            }
        }
    }

    fn channel<T: Real>(&mut self, ch: &KrausChannel<T>) {
        self.register(ch.input());
        self.register(ch.output());
        self.count(ch.kraus().len());
        for k in ch.kraus() {
            self.matrix(k);
        }
    }

    fn finish(self) -> String {
        hex::encode(self.0.finalize())
    }
}

pub fn model_digest<T: Real>(model: &ActionModel<T>) -> String {
    let mut h = Hasher(Sha256::new());
    h.tag("model");
    h.channel(model.action());
    h.channel(model.comm());
    h.finish()
}

pub fn strategy_digest<T: Real>(strategy: &Strategy<T>) -> String {
    let mut h = Hasher(Sha256::new());
    h.tag("strategy");
    h.count(strategy.nv());
    h.count(strategy.nu());
    for row in strategy.p_vu() {
        for &p in row {
            h.num(p.as_f64());
        }
    }
    for s in strategy.action_states() {
        h.register(s.register());
        h.matrix(s.matrix());
    }
    for f in strategy.encoders() {
        h.channel(f);
    }
    h.finish()
}

/// Digest of arbitrary bytes, used for report input digests.
pub fn bytes_digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
