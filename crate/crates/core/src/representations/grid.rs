use crate::error::{Error, Result};
use std::io::Write;

/// Dense H x W x N_c feature volume, row-major with channels innermost.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureGrid {
    data: Vec<f64>,
    width: usize,
    height: usize,
    n_c: usize,
}

impl FeatureGrid {
    pub fn zeros(width: usize, height: usize, n_c: usize) -> Self {
        FeatureGrid { data: vec![0.0; width * height * n_c], width, height, n_c }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn n_c(&self) -> usize {
        self.n_c
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, c: usize) -> f64 {
        self.data[(y * self.width + x) * self.n_c + c]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, c: usize, v: f64) {
        self.data[(y * self.width + x) * self.n_c + c] = v;
    }

    #[inline]
    pub fn add(&mut self, x: usize, y: usize, c: usize, v: f64) {
        self.data[(y * self.width + x) * self.n_c + c] += v;
    }

    /// Feature vector of one pixel.
    pub fn pixel(&self, x: usize, y: usize) -> &[f64] {
        let base = (y * self.width + x) * self.n_c;
        &self.data[base..base + self.n_c]
    }

    /// Writes one channel image, replacing the existing values.
    pub fn set_channel(&mut self, c: usize, image: &[f64]) {
        assert_eq!(image.len(), self.width * self.height);
        for (i, &v) in image.iter().enumerate() {
            self.data[i * self.n_c + c] = v;
        }
    }

    pub fn channel_sum(&self, c: usize) -> f64 {
        self.data[c..].iter().step_by(self.n_c).sum()
    }

    pub fn validate_finite(&self) -> Result<()> {
        if self.data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical {
                iterations: 0,
                msg: "feature grid contains non-finite values".into(),
            });
        }
        Ok(())
    }

    /// Serializes as NPY v1.0: float64, C order, shape (H, W, N_c).
    pub fn write_npy(&self, out: &mut impl Write) -> Result<()> {
        let mut header = format!(
            "{{'descr': '<f8', 'fortran_order': False, 'shape': ({}, {}, {}), }}",
            self.height, self.width, self.n_c
        );
        let unpadded = 10 + header.len() + 1;
        let pad = (64 - unpadded % 64) % 64;
        header.push_str(&" ".repeat(pad));
        header.push('\n');
        out.write_all(b"\x93NUMPY\x01\x00")?;
        out.write_all(&(header.len() as u16).to_le_bytes())?;
        out.write_all(header.as_bytes())?;
        for v in &self.data {
            out.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }
}
