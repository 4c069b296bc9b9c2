"""RGBA texture images with PNG IO and the two sampling filters.

Convention: pixel row 0 is the TOP of the image; texture coordinate v=0 maps
to the BOTTOM.  The flip happens here, at the IO boundary, so the rest of the
pipeline works purely in uv space with v pointing up.
"""

from __future__ import annotations

import numpy as np
from PIL import Image


class TextureImage:
    """Row-major RGBA8 pixel grid.

    ``defined`` is a per-pixel flag used on generated output images to track
    which pixels were written by rasterization or dilation; it is None for
    source atlases.
    """

    def __init__(self, width: int, height: int, pixels=None, defined=None):
        if width < 1 or height < 1:
            raise ValueError("texture dimensions must be >= 1")
        self.width = int(width)
        self.height = int(height)
        if pixels is None:
            pixels = np.zeros((self.height, self.width, 4), dtype=np.uint8)
        self.pixels = np.ascontiguousarray(pixels, dtype=np.uint8)
        if self.pixels.shape != (self.height, self.width, 4):
            raise ValueError(f"pixel array must be ({height}, {width}, 4) RGBA8")
        self.defined = None
        if defined is not None:
            self.defined = np.ascontiguousarray(defined, dtype=bool)
            if self.defined.shape != (self.height, self.width):
                raise ValueError("defined mask shape must match the image")

    @classmethod
    def from_file(cls, path) -> "TextureImage":
        with Image.open(path) as im:
            rgba = im.convert("RGBA")
            px = np.asarray(rgba, dtype=np.uint8)
        return cls(rgba.width, rgba.height, px)

    def save_png(self, path, rgba: bool = False):
        data = self.pixels if rgba else self.pixels[..., :3]
        Image.fromarray(data, mode="RGBA" if rgba else "RGB").save(path, format="PNG")

    def constant_like(self, color) -> "TextureImage":
        px = np.empty_like(self.pixels)
        px[:] = np.asarray(color, dtype=np.uint8)
        return TextureImage(self.width, self.height, px)

    # ------------------------------------------------------------------
    # sampling (vectorized; u, v are arrays in [0, 1], v up)

    def sample_nearest(self, u, v) -> np.ndarray:
        u = np.asarray(u, dtype=np.float64)
        v = np.asarray(v, dtype=np.float64)
        col = np.clip(np.floor(u * self.width), 0, self.width - 1).astype(np.int64)
        row_up = np.clip(np.floor(v * self.height), 0, self.height - 1).astype(np.int64)
        return self.pixels[self.height - 1 - row_up, col]

    def sample_bilinear(self, u, v) -> np.ndarray:
        u = np.asarray(u, dtype=np.float64)
        v = np.asarray(v, dtype=np.float64)
        fx = u * self.width - 0.5
        fy = v * self.height - 0.5
        c0 = np.floor(fx)
        r0 = np.floor(fy)
        tx = fx - c0
        ty = fy - r0
        c0 = c0.astype(np.int64)
        r0 = r0.astype(np.int64)
        c1 = np.clip(c0 + 1, 0, self.width - 1)
        r1 = np.clip(r0 + 1, 0, self.height - 1)
        c0 = np.clip(c0, 0, self.width - 1)
        r0 = np.clip(r0, 0, self.height - 1)
        rows0 = self.height - 1 - r0
        rows1 = self.height - 1 - r1
        p00 = self.pixels[rows0, c0].astype(np.float64)
        p10 = self.pixels[rows0, c1].astype(np.float64)
        p01 = self.pixels[rows1, c0].astype(np.float64)
        p11 = self.pixels[rows1, c1].astype(np.float64)
        tx = tx[..., None]
        ty = ty[..., None]
        blend = (p00 * (1 - tx) * (1 - ty) + p10 * tx * (1 - ty)
                 + p01 * (1 - tx) * ty + p11 * tx * ty)
        # round half up on the blended float
        return np.clip(np.floor(blend + 0.5), 0, 255).astype(np.uint8)

    def __repr__(self):
        return f"TextureImage({self.width}x{self.height})"
