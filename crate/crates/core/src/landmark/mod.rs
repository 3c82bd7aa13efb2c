//! Landmark time series and recording metadata: the data model and the two
//! on-disk formats exchanged with the hand-tracking adapter.

mod meta;
mod table;
mod types;

use std::collections::BTreeSet;
use std::path::Path;

pub use meta::{default_camera, parse_camera, parse_meta, serialize_meta, DEFAULT_CAMERA_TOML};
pub use table::{parse_landmark_file, parse_tracks, serialize_landmark_file, HEADER};
pub use types::{LandmarkId, LandmarkSample, LandmarkTrack, Recording, RecordingMeta};

use crate::camera::CameraSpec;
use crate::error::{Error, Result};

/// Tracks picked out of a recording, plus the requested ids it lacked.
#[derive(Debug, Clone)]
pub struct Selection<'a> {
    pub tracks: Vec<&'a LandmarkTrack>,
    pub missing: Vec<LandmarkId>,
}

/// Returns the requested tracks in ascending id order.
pub fn select_monitored_tracks<'a>(
    rec: &'a Recording,
    ids: &BTreeSet<LandmarkId>,
) -> Result<Selection<'a>> {
    if ids.is_empty() {
        return Err(Error::Config("landmark id selection is empty".into()));
    }
    let (present, missing): (Vec<LandmarkId>, Vec<LandmarkId>) =
        ids.iter().partition(|id| rec.track(**id).is_some());
    if present.is_empty() {
        return Err(Error::EmptySelection {
            requested: ids.iter().map(|id| id.get()).collect(),
        });
    }
    Ok(Selection {
        tracks: present.iter().filter_map(|id| rec.track(*id)).collect(),
        missing,
    })
}

/// Loads a landmark table and its metadata file.
pub fn read_recording(
    landmarks: impl AsRef<Path>,
    meta: impl AsRef<Path>,
    default_camera: &CameraSpec,
) -> Result<Recording> {
    let (landmarks, meta) = (landmarks.as_ref(), meta.as_ref());
    let meta = std::fs::read_to_string(meta)
        .map_err(Error::from)
        .and_then(|text| parse_meta(&text, default_camera))
        .map_err(|e| e.in_file(meta))?;
    std::fs::read(landmarks)
        .map_err(Error::from)
        .and_then(|bytes| parse_landmark_file(&bytes, meta))
        .map_err(|e| e.in_file(landmarks))
}

/// Writes `rec` as a landmark table and a metadata file.
pub fn write_recording(
    rec: &Recording,
    landmarks: impl AsRef<Path>,
    meta: impl AsRef<Path>,
) -> Result<()> {
    let (landmarks, meta) = (landmarks.as_ref(), meta.as_ref());
    std::fs::write(landmarks, serialize_landmark_file(rec))
        .map_err(|e| Error::from(e).in_file(landmarks))?;
    std::fs::write(meta, serialize_meta(rec.meta())).map_err(|e| Error::from(e).in_file(meta))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;

    fn recording(ids: &[u8]) -> Recording {
        let meta = RecordingMeta::for_camera(CameraSpec::IPHONE_XR_FRONT, 50.0, 60.0);
        let tracks: BTreeMap<_, _> = ids
            .iter()
            .map(|&i| {
                let id = LandmarkId::new(i).unwrap();
                let s = LandmarkSample {
                    frame_index: 0,
                    t: 0.0,
                    landmark_id: id,
                    x: 1.0,
                    y: 2.0,
                    confidence: 1.0,
                };
                (id, LandmarkTrack::new(id, vec![s]).unwrap())
            })
            .collect();
        Recording::new(meta, tracks).unwrap()
    }

    fn ids(v: &[u8]) -> BTreeSet<LandmarkId> {
        v.iter().map(|&i| LandmarkId::new(i).unwrap()).collect()
    }

    #[test]
    fn default_ids_on_full_hand() {
        let rec = recording(&(0..21).collect::<Vec<_>>());
        let sel = select_monitored_tracks(&rec, &LandmarkId::MONITORED.into()).unwrap();
        let got: Vec<u8> = sel.tracks.iter().map(|t| t.landmark_id().get()).collect();
        assert_eq!(got, [2, 3, 4, 5, 6, 8]);
        assert!(sel.missing.is_empty());
    }

    #[test]
    fn single_and_partial_selection() {
        let rec = recording(&[2, 3, 4]);
        let sel = select_monitored_tracks(&rec, &ids(&[4])).unwrap();
        assert_eq!(sel.tracks.len(), 1);
        let sel = select_monitored_tracks(&rec, &ids(&[4, 8])).unwrap();
        assert_eq!(sel.missing, ids(&[8]).into_iter().collect::<Vec<_>>());
    }

    #[test]
    fn nothing_selected() {
        let rec = recording(&[2, 3, 4]);
        assert!(matches!(
            select_monitored_tracks(&rec, &ids(&[9])),
            Err(Error::EmptySelection { requested }) if requested == [9]
        ));
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let rec = recording(&[4, 8]);
        let (l, m) = (dir.path().join("r.csv"), dir.path().join("r.meta.toml"));
        write_recording(&rec, &l, &m).unwrap();
        let back = read_recording(&l, &m, &CameraSpec::default()).unwrap();
        assert_eq!(back, rec);
        assert!(matches!(
            read_recording(&l, dir.path().join("nope.toml"), &CameraSpec::default())
                .unwrap_err()
                .root(),
            Error::Io(_)
        ));
    }
}
