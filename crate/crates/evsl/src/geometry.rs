//! Pinhole projection, ray casting and two-ray triangulation.
//!
//! Both the camera and the projector are pinhole devices. The world frame is
//! the camera frame (camera at the origin looking down +z, x right, y down);
//! a device pose maps world points into the device frame as
//! `x_dev = R * (x_world - t)`, so `t` is the device origin expressed in
//! world coordinates.

use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum GeometryError {
    #[error("invalid intrinsics: {0}")]
    InvalidIntrinsics(String),
    #[error("rotation is not orthonormal (deviation {0:.3e})")]
    NotARotation(f64),
    #[error("point is behind the device (z = {0:.6})")]
    PointBehind(f64),
    #[error("ray is parallel to the plane")]
    RayParallelToPlane,
    #[error("plane lies behind the ray origin (t = {0:.6})")]
    IntersectionBehind(f64),
    #[error("rays are near-parallel, no stable triangulation")]
    RaysNearParallel,
    #[error("invalid plane: {0}")]
    InvalidPlane(String),
}

/// Pinhole device model: intrinsics, pixel resolution and rigid pose.
///
/// Pixel coordinates are continuous; the center of the pixel at integer
/// index (i, j) is exactly (i, j).
#[derive(Debug, Clone)]
pub struct PinholeModel {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: u32,
    pub height: u32,
    /// World-to-device rotation.
    pub rotation: Matrix3<f64>,
    /// Device origin in world coordinates.
    pub translation: Vector3<f64>,
}

impl PinholeModel {
    pub fn new(
        fx: f64,
        fy: f64,
        cx: f64,
        cy: f64,
        width: u32,
        height: u32,
        rotation: Matrix3<f64>,
        translation: Vector3<f64>,
    ) -> Result<Self, GeometryError> {
        if !(fx > 0.0) || !(fy > 0.0) {
            return Err(GeometryError::InvalidIntrinsics(format!(
                "focal lengths must be positive, got fx={fx}, fy={fy}"
            )));
        }
        if width == 0 || height == 0 {
            return Err(GeometryError::InvalidIntrinsics(format!(
                "resolution must be at least 1x1, got {width}x{height}"
            )));
        }
        if !(0.0 <= cx && cx < width as f64) || !(0.0 <= cy && cy < height as f64) {
            return Err(GeometryError::InvalidIntrinsics(format!(
                "principal point ({cx}, {cy}) outside {width}x{height} frame"
            )));
        }
        let dev = (rotation.transpose() * rotation - Matrix3::identity()).abs().max();
        let det_dev = (rotation.determinant() - 1.0).abs();
        if dev > 1e-9 || det_dev > 1e-9 {
            return Err(GeometryError::NotARotation(dev.max(det_dev)));
        }
        Ok(Self { fx, fy, cx, cy, width, height, rotation, translation })
    }

    /// Axis-aligned device at `origin` looking down world +z.
    pub fn axis_aligned(
        fx: f64,
        fy: f64,
        cx: f64,
        cy: f64,
        width: u32,
        height: u32,
        origin: Vector3<f64>,
    ) -> Result<Self, GeometryError> {
        Self::new(fx, fy, cx, cy, width, height, Matrix3::identity(), origin)
    }

    /// Device origin in world coordinates.
    pub fn center(&self) -> Vector3<f64> {
        self.translation
    }

    /// Projects a world point to continuous pixel coordinates.
    pub fn project(&self, point: Vector3<f64>) -> Result<(f64, f64), GeometryError> {
        let q = self.rotation * (point - self.translation);
        if q.z <= 1e-12 {
            return Err(GeometryError::PointBehind(q.z));
        }
        Ok((self.fx * q.x / q.z + self.cx, self.fy * q.y / q.z + self.cy))
    }

    /// Casts the world-frame viewing ray through a continuous pixel.
    pub fn backproject(&self, px: f64, py: f64) -> Ray {
        let dir_dev = Vector3::new((px - self.cx) / self.fx, (py - self.cy) / self.fy, 1.0);
        let dir = self.rotation.transpose() * dir_dev;
        Ray::new(self.translation, dir)
    }

    pub fn contains_pixel(&self, px: f64, py: f64) -> bool {
        px >= -0.5 && py >= -0.5 && px < self.width as f64 - 0.5 && py < self.height as f64 - 0.5
    }
}

/// Half-line with unit direction.
#[derive(Debug, Clone, Copy)]
pub struct Ray {
    pub origin: Vector3<f64>,
    pub direction: Vector3<f64>,
}

impl Ray {
    /// Builds a ray, normalizing `direction`. Panics on a zero direction,
    /// which no caller can legitimately produce.
    pub fn new(origin: Vector3<f64>, direction: Vector3<f64>) -> Self {
        let n = direction.norm();
        assert!(n > 0.0, "ray direction must be nonzero");
        Self { origin, direction: direction / n }
    }

    pub fn at(&self, t: f64) -> Vector3<f64> {
        self.origin + t * self.direction
    }
}

/// RGB reflectance texture with components in [0, 1].
#[derive(Debug, Clone)]
pub struct AlbedoMap {
    pub width: u32,
    pub height: u32,
    data: Vec<[f64; 3]>,
}

impl AlbedoMap {
    pub fn new(width: u32, height: u32, data: Vec<[f64; 3]>) -> Result<Self, GeometryError> {
        if width == 0 || height == 0 || data.len() != (width as usize) * (height as usize) {
            return Err(GeometryError::InvalidPlane(format!(
                "albedo map {width}x{height} needs {} texels, got {}",
                (width as u64) * (height as u64),
                data.len()
            )));
        }
        for (i, t) in data.iter().enumerate() {
            if t.iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(GeometryError::InvalidPlane(format!(
                    "albedo at texel {i} out of [0,1]: {t:?}"
                )));
            }
        }
        Ok(Self { width, height, data })
    }

    pub fn from_fn(width: u32, height: u32, f: impl Fn(u32, u32) -> [f64; 3]) -> Self {
        let mut data = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data).expect("generator produced out-of-range albedo")
    }

    pub fn texel(&self, x: u32, y: u32) -> [f64; 3] {
        self.data[y as usize * self.width as usize + x as usize]
    }

    /// Nearest-texel sample; continuous coordinates are clamped to the edge,
    /// so the border color extends beyond the mapped area.
    pub fn sample(&self, tu: f64, tv: f64) -> [f64; 3] {
        let x = (tu.round().max(0.0) as u32).min(self.width - 1);
        let y = (tv.round().max(0.0) as u32).min(self.height - 1);
        self.texel(x, y)
    }
}

/// Affine texel grid on a plane: `origin` is the 3-D center of texel (0, 0)
/// and one texel spans `u_step` x `v_step` meters.
#[derive(Debug, Clone, Copy)]
pub struct PlaneFrame {
    pub origin: Vector3<f64>,
    pub u_step: Vector3<f64>,
    pub v_step: Vector3<f64>,
}

impl PlaneFrame {
    /// Continuous texel coordinates of a point assumed to lie on the plane.
    pub fn texel_of(&self, point: Vector3<f64>) -> (f64, f64) {
        let dp = point - self.origin;
        (dp.dot(&self.u_step) / self.u_step.norm_squared(),
         dp.dot(&self.v_step) / self.v_step.norm_squared())
    }
}

/// Textured Lambertian plane `n . x = d` with outward unit normal.
#[derive(Debug, Clone)]
pub struct ScenePlane {
    pub normal: Vector3<f64>,
    pub d: f64,
    pub albedo: AlbedoMap,
    pub frame: PlaneFrame,
}

impl ScenePlane {
    pub fn new(
        normal: Vector3<f64>,
        d: f64,
        albedo: AlbedoMap,
        frame: PlaneFrame,
    ) -> Result<Self, GeometryError> {
        if (normal.norm() - 1.0).abs() > 1e-9 {
            return Err(GeometryError::InvalidPlane(format!(
                "normal must be unit length, |n| = {}",
                normal.norm()
            )));
        }
        let u_in = frame.u_step.dot(&normal).abs();
        let v_in = frame.v_step.dot(&normal).abs();
        if u_in > 1e-9 || v_in > 1e-9 {
            return Err(GeometryError::InvalidPlane(
                "texel axes must lie in the plane".into(),
            ));
        }
        Ok(Self { normal, d, albedo, frame })
    }

    /// Plane at `distance_m` straight ahead of the world origin, rotated by
    /// `tilt_y_deg` about the vertical axis, textured so the albedo map is
    /// centered on the optical axis and spans `width_m` meters horizontally
    /// (height follows the texture aspect ratio).
    pub fn frontal(
        distance_m: f64,
        tilt_y_deg: f64,
        albedo: AlbedoMap,
        width_m: f64,
    ) -> Result<Self, GeometryError> {
        if !(distance_m > 0.0) || !(width_m > 0.0) {
            return Err(GeometryError::InvalidPlane(format!(
                "distance and width must be positive, got {distance_m}, {width_m}"
            )));
        }
        let t = tilt_y_deg.to_radians();
        // Outward normal faces the camera (-z when untilted).
        let normal = Vector3::new(-t.sin(), 0.0, -t.cos());
        let p0 = Vector3::new(0.0, 0.0, distance_m);
        let d = normal.dot(&p0);

        let u_dir = Vector3::new(t.cos(), 0.0, -t.sin());
        let v_dir = Vector3::new(0.0, 1.0, 0.0);
        let tex_w = albedo.width as f64;
        let tex_h = albedo.height as f64;
        let mpp = width_m / tex_w;
        let height_m = mpp * tex_h;
        let origin =
            p0 + (mpp / 2.0 - width_m / 2.0) * u_dir + (mpp / 2.0 - height_m / 2.0) * v_dir;
        Self::new(
            normal,
            d,
            albedo,
            PlaneFrame { origin, u_step: mpp * u_dir, v_step: mpp * v_dir },
        )
    }

    pub fn albedo_at(&self, point: Vector3<f64>) -> [f64; 3] {
        let (tu, tv) = self.frame.texel_of(point);
        self.albedo.sample(tu, tv)
    }
}

/// Ray-plane intersection result.
#[derive(Debug, Clone, Copy)]
pub struct PlaneHit {
    pub point: Vector3<f64>,
    /// Continuous texel coordinates of the hit.
    pub texel: (f64, f64),
    /// Ray parameter in meters.
    pub t: f64,
}

/// Intersects a ray with the bare plane `n.x = d`, returning the hit point
/// and ray parameter. Used for light planes that carry no texture frame.
pub fn intersect_ray_raw_plane(
    ray: &Ray,
    normal: &Vector3<f64>,
    d: f64,
) -> Result<(Vector3<f64>, f64), GeometryError> {
    let denom = normal.dot(&ray.direction);
    if denom.abs() <= 1e-12 {
        return Err(GeometryError::RayParallelToPlane);
    }
    let t = (d - normal.dot(&ray.origin)) / denom;
    if t < 0.0 {
        return Err(GeometryError::IntersectionBehind(t));
    }
    Ok((ray.at(t), t))
}

/// Intersects a ray with a scene plane: `t = (d - n.o) / (n.dir)`.
pub fn intersect_ray_plane(ray: &Ray, plane: &ScenePlane) -> Result<PlaneHit, GeometryError> {
    let (point, t) = intersect_ray_raw_plane(ray, &plane.normal, plane.d)?;
    Ok(PlaneHit { point, texel: plane.frame.texel_of(point), t })
}

/// Midpoint of the shortest segment between two rays plus the segment length
/// (the triangulation gap). Near-parallel rays are rejected.
pub fn triangulate_rays(a: &Ray, b: &Ray) -> Result<(Vector3<f64>, f64), GeometryError> {
    let w0 = a.origin - b.origin;
    let dot = a.direction.dot(&b.direction);
    let denom = 1.0 - dot * dot;
    if denom <= 1e-12 {
        return Err(GeometryError::RaysNearParallel);
    }
    let da = a.direction.dot(&w0);
    let db = b.direction.dot(&w0);
    let s = (dot * db - da) / denom;
    let t = (db - dot * da) / denom;
    let pa = a.at(s);
    let pb = b.at(t);
    Ok(((pa + pb) / 2.0, (pa - pb).norm()))
}
