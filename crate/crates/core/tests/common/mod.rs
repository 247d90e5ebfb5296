#![allow(dead_code)]

/// Sample mean, unbiased variance and standard error of the mean.
pub fn moments(xs: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var, (var / n).sqrt())
}

/// Standard error of the sample variance, `sqrt((m4 - s^4) / n)`.
pub fn variance_se(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mean, var, _) = moments(xs);
    let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
    ((m4 - var * var) / n).sqrt()
}

/// Small generator independent of the crate's streams.
pub struct SplitMix(pub u64);

impl SplitMix {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// One multinomial draw of `n` trials over probabilities `p`.
    pub fn multinomial(&mut self, n: usize, p: &[f64]) -> Vec<u64> {
        let mut counts = vec![0u64; p.len()];
        for _ in 0..n {
            let mut u = self.uniform();
            let mut k = p.len() - 1;
            for (i, &pi) in p.iter().enumerate() {
                if u < pi {
                    k = i;
                    break;
                }
                u -= pi;
            }
            counts[k] += 1;
        }
        counts
    }
}
