use crate::geometry::Point3;

use super::{SkeletonError, SkeletonFrame, SkeletonStream};

/// Default analysis window: 5 s at 20 Hz.
pub const DEFAULT_WINDOW_FRAMES: usize = 100;

/// A contiguous, gap-free run of frames from one stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window<'a> {
    /// Position of the first frame within the stream.
    pub start_frame: usize,
    pub frames: &'a [SkeletonFrame],
    pub frame_rate_hz: f64,
}

impl<'a> Window<'a> {
    pub fn new(frames: &'a [SkeletonFrame], frame_rate_hz: f64) -> Self {
        Window { start_frame: 0, frames, frame_rate_hz }
    }

    pub fn length_frames(&self) -> usize {
        self.frames.len()
    }

    /// Duration covered by the window, `frames / rate` seconds.
    pub fn duration_seconds(&self) -> f64 {
        self.frames.len() as f64 / self.frame_rate_hz
    }

    /// Positions of one layout point across the window.
    pub fn track(&self, point: usize) -> Vec<Point3> {
        self.frames.iter().map(|f| f.coords[point]).collect()
    }

    pub fn last_frame(&self) -> Option<&'a SkeletonFrame> {
        self.frames.last()
    }
}

/// Cuts a stream into windows of `length_frames`, advancing `stride_frames`
/// each time. Pass `stride_frames == length_frames` for tumbling windows.
///
/// Returns an empty list (not an error) when the stream is shorter than one
/// window.
pub fn windows(stream: &SkeletonStream, length_frames: usize, stride_frames: usize) -> Result<Vec<Window<'_>>, SkeletonError> {
    if length_frames == 0 || stride_frames == 0 {
        return Err(SkeletonError::Config("window length and stride must be positive".into()));
    }
    let frames = stream.frames();
    if length_frames > frames.len() {
        return Ok(Vec::new());
    }
    let count = (frames.len() - length_frames) / stride_frames + 1;
    Ok((0..count)
        .map(|k| {
            let start = k * stride_frames;
            Window { start_frame: start, frames: &frames[start..start + length_frames], frame_rate_hz: stream.frame_rate_hz() }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::skeleton::{Modality, ModalityLayout};

    fn stream(n: usize) -> SkeletonStream {
        let layout = ModalityLayout::new(Modality::Hand, &["p"]).unwrap();
        let frames =
            (0..n).map(|i| SkeletonFrame { frame_index: i as u64, timestamp: i as f64 * 0.05, coords: vec![Point3::default()] }).collect();
        SkeletonStream::new(layout, frames, 20.0).unwrap()
    }

    #[test]
    fn one_window_per_hundred_frames() {
        let s = stream(100);
        let w = windows(&s, 100, 100).unwrap();
        assert_eq!(w.len(), 1);
        assert!((w[0].duration_seconds() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn tumbling_and_sliding_counts() {
        let s = stream(250);
        let starts: Vec<usize> = windows(&s, 100, 100).unwrap().iter().map(|w| w.start_frame).collect();
        assert_eq!(starts, vec![0, 100]);

        // oracle: enumerate every start s with s + 100 <= 250 on a stride of 50
        let oracle: Vec<usize> = (0..250).step_by(50).filter(|s| s + 100 <= 250).collect();
        let starts: Vec<usize> = windows(&s, 100, 50).unwrap().iter().map(|w| w.start_frame).collect();
        assert_eq!(starts, oracle);
        assert_eq!(starts.len(), 4);
    }

    #[test]
    fn too_long_is_empty_not_error() {
        let s = stream(10);
        assert!(windows(&s, 11, 11).unwrap().is_empty());
        assert!(windows(&s, 0, 1).is_err());
        assert!(windows(&s, 5, 0).is_err());
    }

    #[test]
    fn windows_are_contiguous() {
        let s = stream(37);
        for w in windows(&s, 7, 3).unwrap() {
            let idx: Vec<u64> = w.frames.iter().map(|f| f.frame_index).collect();
            let expect: Vec<u64> = (w.start_frame as u64..(w.start_frame + 7) as u64).collect();
            assert_eq!(idx, expect);
        }
    }
}
