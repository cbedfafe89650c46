/** CSV export of reconstructed components, numbers passed through verbatim. */

import type { ReconstructionPayload } from "./types.js";

export function reconstructionToCsv(
  payload: ReconstructionPayload,
  groupIndex: number,
): string {
  const group = payload.groups[groupIndex];
  if (!group) throw new Error(`no group at position ${groupIndex}`);
  const N = group.curves[0]?.length ?? 0;
  const header = ["s", ...Array.from({ length: N }, (_, j) => `t${j + 1}`)];
  const lines = [header.join(",")];
  payload.s.forEach((s, i) => {
    lines.push([String(s), ...group.curves[i].map((x) => String(x))].join(","));
  });
  return lines.join("\n") + "\n";
}
