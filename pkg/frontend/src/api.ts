import type {
  ApiViolation,
  BrowseView,
  LoginResult,
  OwnService,
  RegisteredProvider,
} from './types.js';

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    readonly detail: string,
    readonly violations: ApiViolation[] = [],
  ) {
    super(detail);
    this.name = 'ApiError';
  }
}

export interface RegistrationForm {
  provider_name: string;
  login_name: string;
  password: string;
  contact_address: string;
  extra_info: string;
}

export interface ServicePayload {
  service_name: string;
  service_type: string;
  host_name: string;
  application_path: string;
  price: { hardware: string; software: string };
  description: string;
}

export interface BrowseFilter {
  type?: string;
  provider?: string;
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** What the app needs from the server. The HTTP client below is the real
 * implementation; tests substitute an in-memory one. */
export interface RegistryApi {
  register(form: RegistrationForm): Promise<RegisteredProvider>;
  login(loginName: string, password: string): Promise<LoginResult>;
  logout(token: string): Promise<void>;
  browse(filter?: BrowseFilter): Promise<BrowseView>;
  myServices(token: string): Promise<OwnService[]>;
  addService(token: string, payload: ServicePayload): Promise<void>;
  updateService(token: string, payload: ServicePayload): Promise<void>;
  removeService(token: string, serviceName: string): Promise<void>;
}

/** Thin typed client for the registry's JSON endpoints. Holds no state;
 * the session token is passed per call so tests can drive several
 * identities through one instance. */
export class PortalApi implements RegistryApi {
  private readonly fetchImpl: FetchLike;

  constructor(
    readonly baseUrl: string = '',
    fetchImpl?: FetchLike,
  ) {
    this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  async register(form: RegistrationForm): Promise<RegisteredProvider> {
    return this.request('POST', '/api/providers', form);
  }

  async login(loginName: string, password: string): Promise<LoginResult> {
    return this.request('POST', '/api/login', {
      login_name: loginName,
      password,
    });
  }

  async logout(token: string): Promise<void> {
    await this.request('POST', '/api/logout', {}, token);
  }

  async browse(filter: BrowseFilter = {}): Promise<BrowseView> {
    const params = new URLSearchParams();
    if (filter.type !== undefined) params.set('type', filter.type);
    if (filter.provider !== undefined) params.set('provider', filter.provider);
    const qs = params.toString();
    return this.request('GET', qs ? `/api/browse?${qs}` : '/api/browse');
  }

  async myServices(token: string): Promise<OwnService[]> {
    const data = await this.request<{ services: OwnService[] }>(
      'GET',
      '/api/my/services',
      undefined,
      token,
    );
    return data.services;
  }

  async addService(token: string, payload: ServicePayload): Promise<void> {
    await this.request('POST', '/api/my/services', payload, token);
  }

  async updateService(token: string, payload: ServicePayload): Promise<void> {
    const path = `/api/my/services/${encodeURIComponent(payload.service_name)}`;
    await this.request('PUT', path, payload, token);
  }

  async removeService(token: string, serviceName: string): Promise<void> {
    const path = `/api/my/services/${encodeURIComponent(serviceName)}`;
    await this.request('DELETE', path, {}, token);
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    token?: string,
  ): Promise<T> {
    const headers: Record<string, string> = {};
    if (body !== undefined) headers['content-type'] = 'application/json';
    if (token !== undefined) headers['authorization'] = `Bearer ${token}`;
    const response = await this.fetchImpl(this.baseUrl + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    let data: Record<string, unknown> = {};
    try {
      data = (await response.json()) as Record<string, unknown>;
    } catch {
      // non-JSON body; the status decides what happens
    }
    if (!response.ok) {
      throw new ApiError(
        response.status,
        typeof data.error === 'string' ? data.error : 'unknown',
        typeof data.detail === 'string' ? data.detail : `HTTP ${response.status}`,
        Array.isArray(data.violations) ? (data.violations as ApiViolation[]) : [],
      );
    }
    return data as T;
  }
}
