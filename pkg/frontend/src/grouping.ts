/** Grouping drafts: the editable partition of eigentriple indices.
 *
 * A draft is immutable; every edit returns a new draft, which makes undo a
 * plain history stack.  Indices are 1-based (matching the CLI and service),
 * must stay within 1..r and may appear in at most one group.  The string
 * form is the CLI group syntax: semicolons between groups, comma/dash lists
 * inside, e.g. "1;2-3;4-5".
 */

export interface Group {
  readonly name: string;
  readonly indices: readonly number[];
}

export interface GroupingDraft {
  readonly r: number;
  readonly groups: readonly Group[];
}

export function emptyDraft(r: number): GroupingDraft {
  if (!Number.isInteger(r) || r < 1) throw new Error(`invalid component count ${r}`);
  return { r, groups: [] };
}

function checkIndices(draft: GroupingDraft, indices: readonly number[]): void {
  const assigned = new Set(draft.groups.flatMap((g) => g.indices));
  for (const i of indices) {
    if (!Number.isInteger(i) || i < 1 || i > draft.r) {
      throw new Error(`index ${i} outside 1..${draft.r}`);
    }
    if (assigned.has(i)) throw new Error(`index ${i} is already assigned`);
    assigned.add(i);
  }
  if (new Set(indices).size !== indices.length) {
    throw new Error("duplicate indices in group");
  }
}

function defaultName(draft: GroupingDraft): string {
  let k = draft.groups.length + 1;
  const taken = new Set(draft.groups.map((g) => g.name));
  while (taken.has(`g${k}`)) k += 1;
  return `g${k}`;
}

export function addGroup(
  draft: GroupingDraft,
  indices: readonly number[],
  name?: string,
): GroupingDraft {
  if (indices.length === 0) throw new Error("a group needs at least one index");
  checkIndices(draft, indices);
  const group: Group = {
    name: name ?? defaultName(draft),
    indices: [...indices].sort((a, b) => a - b),
  };
  return { r: draft.r, groups: [...draft.groups, group] };
}

export function removeGroup(draft: GroupingDraft, at: number): GroupingDraft {
  requireGroup(draft, at);
  return { r: draft.r, groups: draft.groups.filter((_, i) => i !== at) };
}

export function assignIndex(draft: GroupingDraft, at: number, index: number): GroupingDraft {
  requireGroup(draft, at);
  checkIndices(draft, [index]);
  const groups = draft.groups.map((g, i) =>
    i === at ? { ...g, indices: [...g.indices, index].sort((a, b) => a - b) } : g,
  );
  return { r: draft.r, groups };
}

export function removeIndex(draft: GroupingDraft, index: number): GroupingDraft {
  const groups = draft.groups
    .map((g) => ({ ...g, indices: g.indices.filter((i) => i !== index) }))
    .filter((g) => g.indices.length > 0);
  return { r: draft.r, groups };
}

export function mergeGroups(draft: GroupingDraft, into: number, from: number): GroupingDraft {
  requireGroup(draft, into);
  requireGroup(draft, from);
  if (into === from) throw new Error("cannot merge a group with itself");
  const merged: Group = {
    name: draft.groups[into].name,
    indices: [...draft.groups[into].indices, ...draft.groups[from].indices].sort(
      (a, b) => a - b,
    ),
  };
  const groups = draft.groups
    .map((g, i) => (i === into ? merged : g))
    .filter((_, i) => i !== from);
  return { r: draft.r, groups };
}

export function splitGroup(
  draft: GroupingDraft,
  at: number,
  moved: readonly number[],
): GroupingDraft {
  requireGroup(draft, at);
  const source = draft.groups[at];
  for (const i of moved) {
    if (!source.indices.includes(i)) {
      throw new Error(`index ${i} is not in group ${source.name}`);
    }
  }
  const kept = source.indices.filter((i) => !moved.includes(i));
  if (kept.length === 0 || moved.length === 0) {
    throw new Error("split must leave both parts non-empty");
  }
  const groups = draft.groups.flatMap((g, i) =>
    i === at
      ? [
          { ...g, indices: kept },
          { name: `${g.name}*`, indices: [...moved].sort((a, b) => a - b) },
        ]
      : [g],
  );
  return { r: draft.r, groups };
}

export function labelGroup(draft: GroupingDraft, at: number, name: string): GroupingDraft {
  requireGroup(draft, at);
  if (!name.trim()) throw new Error("label must be non-empty");
  const groups = draft.groups.map((g, i) => (i === at ? { ...g, name } : g));
  return { r: draft.r, groups };
}

export function unassigned(draft: GroupingDraft): number[] {
  const taken = new Set(draft.groups.flatMap((g) => g.indices));
  const pool: number[] = [];
  for (let i = 1; i <= draft.r; i += 1) if (!taken.has(i)) pool.push(i);
  return pool;
}

function requireGroup(draft: GroupingDraft, at: number): void {
  if (at < 0 || at >= draft.groups.length) throw new Error(`no group at position ${at}`);
}

/** Serialize to the CLI --groups syntax with consecutive runs collapsed. */
export function toGroupString(draft: GroupingDraft): string {
  if (draft.groups.length === 0) throw new Error("draft has no groups");
  return draft.groups
    .map((g) => {
      const sorted = [...g.indices].sort((a, b) => a - b);
      const runs: Array<[number, number]> = [[sorted[0], sorted[0]]];
      for (const i of sorted.slice(1)) {
        if (i === runs[runs.length - 1][1] + 1) runs[runs.length - 1][1] = i;
        else runs.push([i, i]);
      }
      return runs.map(([a, b]) => (a === b ? `${a}` : `${a}-${b}`)).join(",");
    })
    .join(";");
}

export function parseGroupString(text: string, r: number): GroupingDraft {
  let draft = emptyDraft(r);
  for (const chunk of text.split(";")) {
    const trimmed = chunk.trim();
    if (!trimmed) throw new Error("empty group in group string");
    const indices: number[] = [];
    for (const token of trimmed.split(",")) {
      const spec = token.trim();
      const range = spec.match(/^(\d+)-(\d+)$/);
      if (range) {
        const lo = Number(range[1]);
        const hi = Number(range[2]);
        if (lo > hi) throw new Error(`range ${spec} is empty`);
        for (let i = lo; i <= hi; i += 1) indices.push(i);
      } else if (/^\d+$/.test(spec)) {
        indices.push(Number(spec));
      } else {
        throw new Error(`bad group token "${spec}"`);
      }
    }
    draft = addGroup(draft, indices);
  }
  return draft;
}

/** Undo stack over immutable drafts. */
export class DraftHistory {
  private past: GroupingDraft[] = [];

  constructor(private current: GroupingDraft) {}

  get draft(): GroupingDraft {
    return this.current;
  }

  get canUndo(): boolean {
    return this.past.length > 0;
  }

  apply(edit: (draft: GroupingDraft) => GroupingDraft): GroupingDraft {
    const next = edit(this.current);
    this.past.push(this.current);
    this.current = next;
    return next;
  }

  undo(): GroupingDraft {
    const prior = this.past.pop();
    if (prior === undefined) throw new Error("nothing to undo");
    this.current = prior;
    return prior;
  }

  reset(draft: GroupingDraft): void {
    this.past = [];
    this.current = draft;
  }
}
