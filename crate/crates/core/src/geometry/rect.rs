use crate::scalar::Real;

/// Axis-aligned image rectangle `(x, y, w, h)` in pixels, `(x, y)` being the
/// top-left corner.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Box2D<T: Real> {
    pub x: T,
    pub y: T,
    pub w: T,
    pub h: T,
}

impl<T: Real> Box2D<T> {
    pub fn new(x: T, y: T, w: T, h: T) -> Self {
        Self { x, y, w, h }
    }

    /// Tight box around a set of `(u, v)` points.
    pub fn bounding(points: impl IntoIterator<Item = (T, T)>) -> Option<Self> {
        let mut it = points.into_iter();
        let (u0, v0) = it.next()?;
        let (mut x0, mut y0, mut x1, mut y1) = (u0, v0, u0, v0);
        for (u, v) in it {
            x0 = x0.min(u);
            y0 = y0.min(v);
            x1 = x1.max(u);
            y1 = y1.max(v);
        }
        Some(Self::new(x0, y0, x1 - x0, y1 - y0))
    }

    pub fn area(&self) -> T {
        self.w * self.h
    }

    /// Same box with its extent clipped to `[0, width] × [0, height]`.
    pub fn clamp_to(&self, width: T, height: T) -> Self {
        let x0 = self.x.max(T::zero()).min(width);
        let y0 = self.y.max(T::zero()).min(height);
        let x1 = (self.x + self.w).max(T::zero()).min(width);
        let y1 = (self.y + self.h).max(T::zero()).min(height);
        Self::new(x0, y0, x1 - x0, y1 - y0)
    }

    pub fn iou(&self, other: &Self) -> T {
        let iw = (self.x + self.w).min(other.x + other.w) - self.x.max(other.x);
        let ih = (self.y + self.h).min(other.y + other.h) - self.y.max(other.y);
        if iw <= T::zero() || ih <= T::zero() {
            return T::zero();
        }
        let inter = iw * ih;
        let union = self.area() + other.area() - inter;
        if union <= T::zero() {
            return T::zero();
        }
        inter / union
    }
}
