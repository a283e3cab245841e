/* tslint:disable */
/* eslint-disable */

/**
 * Every linearization of a small graph, or an error past `limit`.
 * `count` distinguishes node orders; `distinct_texts` does not.
 */
export function enumerate(graph_json: string, limit: number): string;

/**
 * `k` linearizations under `strategy`. Each comes with its token text,
 * length, chord and segment counts, and the node order it used.
 */
export function linearize(graph_json: string, strategy: string, seed: bigint, k: number): string;

/**
 * Delaunay triangulation of `n` random points in the unit square, with the
 * points for drawing.
 */
export function random_planar(n: number, seed: bigint): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly enumerate: (a: number, b: number, c: number) => [number, number, number, number];
    readonly linearize: (a: number, b: number, c: number, d: number, e: bigint, f: number) => [number, number, number, number];
    readonly random_planar: (a: number, b: bigint) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
