"""Color segmentation of a generated cutting-board scene.

Renders a loin with a fat band and two markers, segments it, extracts the
fat-meat interface, and writes the scene plus an annotated overlay as PPM.
"""

from cutsim.harness import generate_scene, random_meat_spec
from cutsim.vision import fat_meat_interface, segment_scene, write_ppm

spec = random_meat_spec(seed=3)
scene, truth = generate_scene(spec, markers=[(0.06, 0.26), (0.34, 0.26)])
seg = segment_scene(scene)

print(f"meat: {seg.meat_area} px ({truth.meat_area_cm2:.1f} cm2 ground truth)")
print(f"fat:  {seg.fat_area} px ({truth.fat_area_cm2:.1f} cm2 ground truth)")
print(f"markers at {[(round(x, 1), round(y, 1)) for x, y in seg.markers]} px")

interface = fat_meat_interface(seg, tol=2.0)
print(f"fat-meat interface: {len(interface)} contour points")

overlay = scene.pixels.copy()
for x, y in seg.meat_contour:
    overlay[y, x] = (255, 255, 0)
for x, y in interface:
    overlay[y, x] = (0, 255, 255)
write_ppm("demo_scene.ppm", scene.pixels)
write_ppm("demo_scene_annotated.ppm", overlay)
print("wrote demo_scene.ppm and demo_scene_annotated.ppm")
