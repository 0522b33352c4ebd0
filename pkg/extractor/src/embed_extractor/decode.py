"""Frame decoding and sampling."""

from __future__ import annotations

import cv2
import numpy as np

from .errors import DecodeError


def decode_frames(video_path, sample_fps: float = 1.0, max_frames: int = 128):
    """Decode frames at ``sample_fps``, capped to ``max_frames``.

    Returns (frames, timestamps): BGR arrays in decode order and their
    timestamps in seconds, strictly increasing. When the sampled set
    still exceeds the cap it is thinned uniformly, preserving order.
    """
    cap = cv2.VideoCapture(str(video_path))
    if not cap.isOpened():
        cap.release()
        raise DecodeError(f"cannot open video: {video_path}")
    native_fps = cap.get(cv2.CAP_PROP_FPS)
    if not native_fps or native_fps <= 0:
        native_fps = 30.0
    stride = max(1, int(round(native_fps / sample_fps)))

    frames, timestamps = [], []
    index = 0
    while True:
        ret, frame = cap.read()
        if not ret:
            break
        if index % stride == 0:
            frames.append(frame)
            timestamps.append(index / native_fps)
        index += 1
    cap.release()
    if not frames:
        raise DecodeError(f"no decodable frames in: {video_path}")

    if len(frames) > max_frames:
        keep = np.linspace(0, len(frames) - 1, max_frames).round().astype(int)
        keep = np.unique(keep)
        frames = [frames[i] for i in keep]
        timestamps = [timestamps[i] for i in keep]
    return frames, timestamps, native_fps
