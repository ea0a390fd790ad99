// Client-side session state. The server also sets an HttpOnly cookie for
// browser navigation; this module keeps the bearer token for API calls and
// the provider name for display. The token is never handed to the views.

export interface KeyValueStore {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

const TOKEN_KEY = 'gmd.token';
const PROVIDER_KEY = 'gmd.provider';

export class PortalSession {
  constructor(private readonly store: KeyValueStore) {}

  begin(token: string, providerName: string): void {
    this.store.setItem(TOKEN_KEY, token);
    this.store.setItem(PROVIDER_KEY, providerName);
  }

  end(): void {
    this.store.removeItem(TOKEN_KEY);
    this.store.removeItem(PROVIDER_KEY);
  }

  get token(): string | null {
    return this.store.getItem(TOKEN_KEY);
  }

  get providerName(): string | null {
    return this.store.getItem(PROVIDER_KEY);
  }

  get loggedIn(): boolean {
    return this.token !== null;
  }
}

/** In-memory store for tests and non-browser runs. */
export class MemoryStore implements KeyValueStore {
  private readonly map = new Map<string, string>();

  getItem(key: string): string | null {
    return this.map.has(key) ? this.map.get(key)! : null;
  }

  setItem(key: string, value: string): void {
    this.map.set(key, value);
  }

  removeItem(key: string): void {
    this.map.delete(key);
  }
}
